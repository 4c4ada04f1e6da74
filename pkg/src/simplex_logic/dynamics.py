"""Communication graphs, patterns and the product update of local models.

After one round an alive agent ``a`` holds the new vertex ``(v_a, X)`` where
``X`` is the part of the old world it heard from.  New vertex ids are the
canonical strings ``v_a{x1,x2,...}``, so nested views after several rounds
stay canonical and extensional merging is plain string equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .simplicial import ModelError, Simplex, SimplicialModel, build_model, natural_key, simplex_key

__all__ = [
    "CommunicationGraph",
    "CommunicationPattern",
    "UpdatedModel",
    "compatible",
    "update_world",
    "product_update",
    "iterate_update",
    "close_under_permutation",
    "pattern_detectable_broadcast",
    "pattern_undetectable_broadcast",
    "pattern_immediate_snapshot_initial_crashes",
    "parse_pattern_spec",
    "view_id",
]


@dataclass(frozen=True)
class CommunicationGraph:
    """Directed delivery graph; ``(a, b)`` means a's message reached b.

    An agent is alive iff it has a loop.
    """

    agents: Tuple[str, ...]
    edges: FrozenSet[Tuple[str, str]]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(sorted(self.agents)))
        object.__setattr__(self, "edges", frozenset(self.edges))
        known = set(self.agents)
        for a, b in self.edges:
            if a not in known or b not in known:
                raise ModelError(f"edge {a}->{b} uses an unknown agent")
        if not self.alive:
            raise ModelError("a communication graph needs an alive agent")

    @classmethod
    def from_out(cls, agents: Iterable[str], out: Mapping[str, Iterable[str]], name: str = ""):
        return cls(tuple(agents), frozenset((a, b) for a, bs in out.items() for b in bs), name)

    @property
    def alive(self) -> FrozenSet[str]:
        return frozenset(a for a, b in self.edges if a == b)

    def n_in(self, a: str) -> FrozenSet[str]:
        return frozenset(x for x, y in self.edges if y == a)

    def n_out(self, a: str) -> FrozenSet[str]:
        return frozenset(y for x, y in self.edges if x == a)

    def out_map(self) -> Dict[str, List[str]]:
        return {a: sorted(self.n_out(a)) for a in self.agents}

    def rename(self, perm: Mapping[str, str]) -> "CommunicationGraph":
        return CommunicationGraph(self.agents, frozenset((perm[a], perm[b]) for a, b in self.edges))

    def label(self) -> str:
        return self.name or _auto_name(self)


def _auto_name(g: CommunicationGraph) -> str:
    everyone = set(g.agents)
    parts = []
    for a in g.agents:
        out = g.n_out(a)
        if a in g.alive and out == everyone:
            continue
        shown = "".join(sorted(out - {a}, key=natural_key)) if len(a) == 1 else ",".join(sorted(out - {a}))
        parts.append(f"{a}{'' if a in g.alive else '!'}>{shown}")
    return "full" if not parts else ";".join(parts)


class CommunicationPattern(tuple):
    """Nonempty, duplicate-free tuple of graphs over one agent set."""

    def __new__(cls, graphs: Iterable[CommunicationGraph]):
        seen: Dict[FrozenSet, CommunicationGraph] = {}
        for g in graphs:
            seen.setdefault(g.edges, g)
        if not seen:
            raise ModelError("a communication pattern needs at least one graph")
        graphs = sorted(seen.values(), key=lambda g: (-len(g.edges), sorted(g.edges)))
        agents = {g.agents for g in graphs}
        if len(agents) != 1:
            raise ModelError("all graphs of a pattern must share the agent set")
        names = [g.label() for g in graphs]
        if len(set(names)) != len(names):
            graphs = [
                CommunicationGraph(g.agents, g.edges, f"G{i}") for i, g in enumerate(graphs, 1)
            ]
        return super().__new__(cls, graphs)

    @property
    def agents(self) -> Tuple[str, ...]:
        return self[0].agents


def compatible(m: SimplicialModel, w: Simplex, g: CommunicationGraph) -> bool:
    """Agents dead in ``w`` send nothing in ``g``."""
    live = m.chi(w)
    return all(not g.n_out(a) for a in g.agents if a not in live)


def view_id(vertex: str, view: Iterable[str]) -> str:
    return vertex + "{" + ",".join(sorted(view, key=natural_key)) + "}"


def update_world(m: SimplicialModel, w: Simplex, g: CommunicationGraph) -> Dict[str, Tuple[str, Simplex]]:
    """``w ⊙ g`` as a map from new vertex id to ``(base vertex, view)``."""
    if not compatible(m, w, g):
        raise ModelError(f"graph {g.label()} is not compatible with world {m.name_of(w)}")
    by_colour = {m.colours[v]: v for v in w}
    out = {}
    for a in sorted(g.alive):
        heard = g.n_in(a)
        view = frozenset(v for c, v in by_colour.items() if c in heard)
        v = by_colour[a]
        out[view_id(v, view)] = (v, view)
    return out


@dataclass
class UpdatedModel:
    model: SimplicialModel
    #: first projection, new vertex -> base vertex
    projection: Dict[str, str]
    #: new world -> (base world name, graph name) pairs that produced it
    sources: Dict[Simplex, List[Tuple[str, str]]]

    @property
    def merged(self) -> List[Simplex]:
        return [w for w, src in self.sources.items() if len(src) > 1]


def product_update(m: SimplicialModel, pattern: Sequence[CommunicationGraph]) -> UpdatedModel:
    """Worlds are all ``w ⊙ G`` for compatible pairs, merged extensionally."""
    if not m.local:
        raise ModelError("product update needs a local (vertex-labelled) model")
    pattern = pattern if isinstance(pattern, CommunicationPattern) else CommunicationPattern(pattern)
    if set(pattern.agents) != set(m.agents):
        raise ModelError("pattern and model disagree on the agent set")
    colours: Dict[str, str] = {}
    projection: Dict[str, str] = {}
    sources: Dict[Simplex, List[Tuple[str, str]]] = {}
    for w in m.worlds:
        for g in pattern:
            if not compatible(m, w, g):
                continue
            verts = update_world(m, w, g)
            for vid, (v, _view) in verts.items():
                colours[vid] = m.colours[v]
                projection[vid] = v
            sources.setdefault(frozenset(verts), []).append((m.name_of(w), g.label()))
    if not sources:
        raise ModelError("no graph of the pattern is compatible with any world")
    worlds = {}
    for w, src in sources.items():
        worlds[".".join(src[0])] = sorted(w, key=natural_key)
    vlabels = {v: m.vertex_labels.get(projection[v], frozenset()) for v in colours}
    new = build_model(
        m.agents,
        colours,
        worlds,
        local=True,
        vertex_labels=vlabels,
        owners=m.owners,
        props=m.props,
    )
    return UpdatedModel(new, projection, sources)


def iterate_update(m: SimplicialModel, pattern, rounds: int) -> UpdatedModel:
    """``rounds`` successive updates; the projection goes back to ``m``."""
    if rounds < 1:
        raise ModelError("rounds must be at least 1")
    res = product_update(m, pattern)
    for _ in range(rounds - 1):
        step = product_update(res.model, pattern)
        step.projection = {v: res.projection[u] for v, u in step.projection.items()}
        res = step
    return res


# --------------------------------------------------------------------------
# pattern builders

def close_under_permutation(
    graphs: Iterable[CommunicationGraph], agents: Optional[Sequence[str]] = None
) -> CommunicationPattern:
    graphs = list(graphs)
    agents = tuple(sorted(agents or graphs[0].agents))
    out = []
    for g in graphs:
        for perm in permutations(agents):
            out.append(g.rename(dict(zip(agents, perm))))
    return CommunicationPattern(out)


def _check_bounds(agents: Sequence[str], max_crashes: int) -> Tuple[str, ...]:
    agents = tuple(sorted(agents))
    if not agents:
        raise ModelError("need at least one agent")
    if not 0 <= max_crashes < len(agents):
        raise ModelError("max_crashes must satisfy 0 <= f < number of agents")
    return agents


def _subsets(items, include_full: bool):
    items = sorted(items)
    top = len(items) if include_full else len(items) - 1
    for r in range(0, top + 1):
        yield from combinations(items, r)


def _broadcast(agents, max_crashes: int, include_full: bool) -> CommunicationPattern:
    agents = _check_bounds(agents, max_crashes)
    graphs = []
    for k in range(0, max_crashes + 1):
        for crashed in combinations(agents, k):
            choices = [list(_subsets(set(agents) - {c}, include_full)) for c in crashed]
            for outs in product(*choices):
                out = {a: agents for a in agents if a not in crashed}
                out.update(dict(zip(crashed, outs)))
                graphs.append(CommunicationGraph.from_out(agents, out))
    return CommunicationPattern(graphs)


def pattern_detectable_broadcast(agents: Sequence[str], max_crashes: int) -> CommunicationPattern:
    """Synchronous broadcast; a crashing agent reaches a proper subset of the
    others, so at least one agent notices."""
    return _broadcast(agents, max_crashes, include_full=False)


def pattern_undetectable_broadcast(agents: Sequence[str], max_crashes: int) -> CommunicationPattern:
    """As the detectable pattern, but a crash may happen after a full send."""
    return _broadcast(agents, max_crashes, include_full=True)


def _ordered_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _ordered_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] | {first}] + part[i + 1:]
        for i in range(len(part) + 1):
            yield part[:i] + [frozenset({first})] + part[i:]


def pattern_immediate_snapshot_initial_crashes(agents: Sequence[str]) -> CommunicationPattern:
    """Immediate snapshot among the participating agents, the others having
    crashed before sending anything."""
    agents = _check_bounds(agents, 0)
    graphs = []
    for r in range(1, len(agents) + 1):
        for live in combinations(agents, r):
            for blocks in _ordered_partitions(live):
                rank = {a: i for i, blk in enumerate(blocks) for a in blk}
                edges = {(x, y) for x in live for y in live if rank[x] <= rank[y]}
                graphs.append(CommunicationGraph(agents, frozenset(edges)))
    return CommunicationPattern(graphs)


def parse_pattern_spec(spec: str, agents: Sequence[str]) -> CommunicationPattern:
    """``detectable:f=1``, ``undetectable:f=2`` or ``immediate``."""
    kind, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise ModelError(f"bad pattern parameter {item!r}")
        params[key.strip()] = val.strip()
    try:
        f = int(params.pop("f", 1))
    except ValueError as exc:
        raise ModelError(f"bad crash bound in {spec!r}") from exc
    if params:
        raise ModelError(f"unknown pattern parameters {sorted(params)}")
    if kind == "detectable":
        return pattern_detectable_broadcast(agents, f)
    if kind == "undetectable":
        return pattern_undetectable_broadcast(agents, f)
    if kind == "immediate":
        return pattern_immediate_snapshot_initial_crashes(agents)
    raise ModelError(f"unknown pattern {kind!r}")
