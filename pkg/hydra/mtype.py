"""
M-types of polynomial functors: possibly infinite trees over a signature,
restricted to the rational ones (those with a finite presentation).

A signature gives each symbol a finite arity. A finite coalgebra for it is a
labelled graph in which every node carries a symbol and an ordered tuple of
children, one per argument position. Unfolding such a graph from its point
gives an element of the M-type; two presentations unfold to the same tree iff
they are bisimilar with children matched position by position.
"""

# Standard
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union
import dataclasses
import enum
import threading

# First Party
import alog

# Local
from .bisimulation import Partition, colour_refine, encode_adjacency, refine_partition
from .config import Limits
from .errors import ResourceBoundError, ValidationError
from .graph import NodeId, from_successors, reachable_restriction

log = alog.use_channel("MTYPE")

## Types #######################################################################


@dataclasses.dataclass(frozen=True, eq=False)
class Signature:
    """Symbols with their (finite) arities"""

    symbols: Tuple[str, ...]
    arity: Mapping[str, int]

    def __post_init__(self):
        if not self.symbols:
            raise ValidationError("A signature needs at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValidationError("Duplicate symbol in signature")
        if set(self.arity) != set(self.symbols):
            raise ValidationError("Every symbol needs exactly one arity")
        for symbol in self.symbols:
            arity = self.arity[symbol]
            if not isinstance(arity, int) or arity < 0:
                raise ValidationError(
                    f"Arity of '{symbol}' must be a non-negative integer, got {arity!r}"
                )

    @classmethod
    def of(cls, arities: Mapping[str, int]) -> "Signature":
        """Signature whose symbol order is the mapping's order"""
        return cls(symbols=tuple(arities), arity=dict(arities))

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError as err:
            raise ValidationError(f"Unknown symbol '{symbol}'") from err

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Signature)
            and self.symbols == other.symbols
            and dict(self.arity) == dict(other.arity)
        )

    def __hash__(self) -> int:
        return hash(tuple((s, self.arity[s]) for s in self.symbols))


@dataclasses.dataclass(frozen=True)
class LabelledApg:
    """A finite coalgebra for a signature: symbol and ordered children per node"""

    signature: Signature
    node_count: int
    label: Tuple[str, ...]
    children: Tuple[Tuple[NodeId, ...], ...]
    point: NodeId

    @classmethod
    def build(
        cls,
        signature: Signature,
        labels: Sequence[str],
        children: Sequence[Sequence[NodeId]],
        point: NodeId,
    ) -> "LabelledApg":
        """Validate and build a labelled graph

        Args:
            signature:  Signature
                The signature the labels come from
            labels:  Sequence[str]
                Symbol of each node
            children:  Sequence[Sequence[NodeId]]
                Ordered children of each node; length must equal the arity
            point:  NodeId
                The distinguished node

        Returns:
            graph:  LabelledApg
                The validated graph
        """
        node_count = len(labels)
        if node_count == 0 or len(children) != node_count:
            raise ValidationError("Need one label and one child tuple per node (>= 1)")
        for node, (symbol, kids) in enumerate(zip(labels, children)):
            signature.index(symbol)
            if len(kids) != signature.arity[symbol]:
                raise ValidationError(
                    f"Arity mismatch at node {node}: '{symbol}' takes "
                    f"{signature.arity[symbol]} children, got {len(kids)}"
                )
            for kid in kids:
                if not isinstance(kid, int) or not 0 <= kid < node_count:
                    raise ValidationError(f"node {kid} out of range [0, {node_count})")
        if not isinstance(point, int) or not 0 <= point < node_count:
            raise ValidationError(f"node {point} out of range [0, {node_count})")
        return cls(
            signature=signature,
            node_count=node_count,
            label=tuple(labels),
            children=tuple(tuple(kids) for kids in children),
            point=point,
        )


@dataclasses.dataclass(frozen=True)
class CanonicalLabelledApg:
    graph: LabelledApg
    encoding: bytes


@dataclasses.dataclass(frozen=True, eq=False)
class MTree:
    """Handle to an interned element of an M-type"""

    id: int
    universe: "MUniverse"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MTree)
            and self.universe is other.universe
            and self.id == other.id
        )

    def __hash__(self) -> int:
        return hash((id(self.universe), self.id))

    def __repr__(self) -> str:
        return f"MTree({self.id})"


class MUniverse:
    """Interned canonical labelled graphs for one signature"""

    def __init__(self, signature: Signature, *, limits: Optional[Limits] = None):
        self.signature = signature
        self.limits = limits or Limits.from_env()
        self._store: Dict[bytes, int] = {}
        self._decode: List[CanonicalLabelledApg] = []
        self._observed: Dict[int, Tuple[str, Tuple[MTree, ...]]] = {}
        self._lock = threading.Lock()
        # Guards _observed; never held while interning
        self._cache_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._decode)

    def canonical(self, t: MTree) -> CanonicalLabelledApg:
        self.check(t)
        return self._decode[t.id]

    def insert(self, canonical: CanonicalLabelledApg) -> MTree:
        """Atomic check-or-insert; first writer wins"""
        with self._lock:
            tree_id = self._store.get(canonical.encoding)
            if tree_id is None:
                tree_id = len(self._decode)
                self._decode.append(canonical)
                self._store[canonical.encoding] = tree_id
        return MTree(id=tree_id, universe=self)

    def check(self, *ts: MTree):
        for t in ts:
            if not isinstance(t, MTree) or t.universe is not self:
                raise TypeError(f"{t!r} is not an element of this M-type")


class Truncated(enum.Enum):
    """Marker for the cut frontier of a truncated tree"""

    CONTINUE = "⋯"


CONTINUE = Truncated.CONTINUE

# A finite observation: CONTINUE or (symbol, children)
Truncation = Union[Truncated, Tuple[str, Tuple["Truncation", ...]]]

## Interface ###################################################################


def unfold(mu: MUniverse, c: LabelledApg) -> MTree:
    """The M-type element presented by a finite coalgebra

    Args:
        mu:  MUniverse
            The M-universe of c's signature
        c:  LabelledApg
            A finite coalgebra

    Returns:
        tree:  MTree
            Handle to the canonical minimal presentation
    """
    if c.signature != mu.signature:
        raise TypeError("Coalgebra signature does not match the M-universe")
    if c.node_count > mu.limits.max_nodes:
        raise ResourceBoundError(
            f"Graph with {c.node_count} nodes exceeds max_nodes={mu.limits.max_nodes}"
        )
    sig = mu.signature

    # Reachable part from the point
    _, reach_map = reachable_restriction(from_successors(c.children, c.point))
    kept = sorted(reach_map, key=reach_map.get)
    symbols = [sig.index(c.label[old]) for old in kept]
    children = [[reach_map[kid] for kid in c.children[old]] for old in kept]
    point = reach_map[c.point]

    # Positional bisimulation: each (node, position) edge becomes an
    # intermediate node labelled by its position
    n = len(kept)
    succ: List[List[NodeId]] = [[] for _ in range(n)]
    labels: List[Tuple[str, int]] = [("symbol", s) for s in symbols]
    for node, kids in enumerate(children):
        for position, kid in enumerate(kids):
            succ[node].append(len(succ))
            succ.append([kid])
            labels.append(("position", position))
    encoded = from_successors(succ, point)
    partition = refine_partition(encoded, Partition.from_labels(labels))
    block_partition = Partition.from_labels(partition.block_of[:n])
    log.debug3("Labelled refinement: %d states -> %d", n, block_partition.block_count)

    # Quotient by representative, then renumber canonically
    representative = [members[0] for members in block_partition.blocks()]
    block_of = block_partition.block_of
    block_symbols = [symbols[rep] for rep in representative]
    block_children = [[block_of[kid] for kid in children[rep]] for rep in representative]
    colours = colour_refine(block_symbols, block_children, positional=True)
    assert len(set(colours)) == len(colours), "PROGRAMMING ERROR: non-minimal quotient"

    count = len(colours)
    canon_symbols = [0] * count
    canon_children: List[Tuple[NodeId, ...]] = [()] * count
    for block, colour in enumerate(colours):
        canon_symbols[colour] = block_symbols[block]
        canon_children[colour] = tuple(colours[kid] for kid in block_children[block])
    canon_point = colours[block_of[point]]
    graph = LabelledApg(
        signature=sig,
        node_count=count,
        label=tuple(sig.symbols[s] for s in canon_symbols),
        children=tuple(canon_children),
        point=canon_point,
    )
    encoding = encode_adjacency(count, canon_point, canon_children, canon_symbols)
    return mu.insert(CanonicalLabelledApg(graph=graph, encoding=encoding))


def mtree_equals(s: MTree, t: MTree) -> bool:
    """Equality of M-type elements; handles must share an M-universe"""
    if not isinstance(s, MTree):
        raise TypeError(f"{s!r} is not an element of an M-type")
    s.universe.check(t)
    return s.id == t.id


def observe(t: MTree) -> Tuple[str, Tuple[MTree, ...]]:
    """The root symbol and the subtrees at each argument position"""
    mu = t.universe
    mu.check(t)
    observed = mu._observed.get(t.id)
    if observed is None:
        graph = mu._decode[t.id].graph
        observed = (
            graph.label[graph.point],
            tuple(
                unfold(mu, dataclasses.replace(graph, point=kid))
                for kid in graph.children[graph.point]
            ),
        )
        with mu._cache_lock:
            observed = mu._observed.setdefault(t.id, observed)
    return observed


def canonical_labelled_encoding(t: MTree) -> bytes:
    """Canonical bytes of t: the unlabelled format with each node's symbol
    index written before its child list. Equal bytes iff equal elements."""
    return t.universe.canonical(t).encoding


def truncate(t: MTree, depth: int) -> Truncation:
    """Cut the tree at the given depth, marking the frontier with CONTINUE

    Args:
        t:  MTree
            The tree
        depth:  int
            Number of symbol levels to keep

    Returns:
        value:  Truncation
            Nested (symbol, children) tuples
    """
    if not isinstance(depth, int) or depth < 0:
        raise ValidationError(f"Depth must be a non-negative integer, got {depth!r}")
    graph = t.universe.canonical(t).graph
    if depth == 0:
        return CONTINUE

    # Nodes at each distance from the point
    layers: List[Set[NodeId]] = [{graph.point}]
    for _ in range(depth - 1):
        layers.append({kid for node in layers[-1] for kid in graph.children[node]})

    # Build bottom-up; children of the deepest layer are the frontier
    below: Dict[NodeId, Truncation] = {}
    for layer in reversed(layers):
        below = {
            node: (
                graph.label[node],
                tuple(below.get(kid, CONTINUE) for kid in graph.children[node]),
            )
            for node in layer
        }
    return below[graph.point]


def format_truncation(value: Truncation) -> str:
    """Render a truncation as nested applications, e.g. u(u(⋯))"""
    out: List[str] = []
    stack: List[Union[Truncation, str]] = [value]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        elif item is CONTINUE:
            out.append(CONTINUE.value)
        elif not item[1]:
            out.append(item[0])
        else:
            symbol, kids = item
            out.append(f"{symbol}(")
            stack.append(")")
            for position in reversed(range(len(kids))):
                stack.append(kids[position])
                if position:
                    stack.append(", ")
    return "".join(out)
