#!/usr/bin/env python3
"""
Feynman Diagrams

Diagram model (vertices, lines, external and massive flags, dimension D), the
corpus builders (bubble, triangle, one-loop polygons, h-loop ladders) and the
spanning r-tree enumerator behind the Symanzik polynomials.

Spanning forests are enumerated by backtracking over the lines in index order:
each line is either added (only when it joins two different components) or
dropped (only while the remaining lines can still bring the forest down to r
components). Results are sorted by their tuple of line indices.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

import networkx as nx
from networkx.utils import UnionFind

from errors import DiagramError

VertexKey = Union[int, str]


@dataclass(frozen=True)
class Vertex:
    name: str
    external: bool


@dataclass(frozen=True)
class Line:
    name: str
    a: int
    b: int
    massive: bool = True

    @property
    def is_self_loop(self) -> bool:
        return self.a == self.b


@dataclass(frozen=True)
class EdgeSubset:
    """A set of line indices stored as a bitmask."""

    mask: int

    @classmethod
    def of(cls, lines: Iterable[int]) -> "EdgeSubset":
        mask = 0
        for i in lines:
            mask |= 1 << i
        return cls(mask)

    @property
    def lines(self) -> Tuple[int, ...]:
        out = []
        m, i = self.mask, 0
        while m:
            if m & 1:
                out.append(i)
            m >>= 1
            i += 1
        return tuple(out)

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __iter__(self) -> Iterator[int]:
        return iter(self.lines)

    def __lt__(self, other: "EdgeSubset") -> bool:
        return self.lines < other.lines

    def complement(self, n_lines: int) -> "EdgeSubset":
        return EdgeSubset(((1 << n_lines) - 1) & ~self.mask)


@dataclass(frozen=True)
class Diagram:
    name: str
    vertices: Tuple[Vertex, ...]
    lines: Tuple[Line, ...]
    dimension: int
    basis: Optional[Tuple[Tuple[str, ...], ...]] = None
    _index: Dict[str, int] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {v.name: i for i, v in enumerate(self.vertices)}
        )

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @property
    def externals(self) -> Tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.vertices) if v.external)

    @property
    def external_names(self) -> Tuple[str, ...]:
        return tuple(self.vertices[i].name for i in self.externals)

    def vertex_index(self, key: VertexKey) -> int:
        name = str(key)
        if name not in self._index:
            raise DiagramError(f"unknown vertex {name!r}")
        return self._index[name]

    def to_networkx(self, subset: Optional[EdgeSubset] = None) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.n_vertices))
        for i, line in enumerate(self.lines):
            if subset is None or i in subset:
                g.add_edge(line.a, line.b, key=i)
        return g

    def components(self, subset: Optional[EdgeSubset] = None) -> int:
        return nx.number_connected_components(self.to_networkx(subset))

    def is_connected(self) -> bool:
        return self.components() == 1

    def to_spec(self) -> Dict[str, Any]:
        spec: Dict[str, Any] = {
            "name": self.name,
            "D": self.dimension,
            "vertices": [{"id": v.name, "external": v.external} for v in self.vertices],
            "lines": [
                {
                    "id": line.name,
                    "from": self.vertices[line.a].name,
                    "to": self.vertices[line.b].name,
                    "massive": line.massive,
                }
                for line in self.lines
            ],
        }
        if self.basis is not None:
            spec["basis"] = [list(chi) for chi in self.basis]
        return spec


def build_diagram(spec: Mapping[str, Any]) -> Diagram:
    """Validate a parsed diagram description and normalize it to dense indices."""
    dim = spec.get("D")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim <= 0 or dim % 2:
        raise DiagramError(f"D must be a positive even integer, got {dim!r}")

    vertices: List[Vertex] = []
    seen = set()
    for record in spec.get("vertices") or []:
        name = str(record["id"])
        if name in seen:
            raise DiagramError(f"duplicate vertex id {name!r}")
        seen.add(name)
        vertices.append(Vertex(name, bool(record.get("external", False))))
    if not vertices:
        raise DiagramError("diagram has no vertices")
    index = {v.name: i for i, v in enumerate(vertices)}

    lines: List[Line] = []
    line_ids = set()
    for record in spec.get("lines") or []:
        name = str(record["id"])
        if name in line_ids:
            raise DiagramError(f"duplicate line id {name!r}")
        line_ids.add(name)
        ends = []
        for key in ("from", "to"):
            end = str(record[key])
            if end not in index:
                raise DiagramError(f"line {name}: endpoint {end!r} is not a declared vertex")
            ends.append(index[end])
        lines.append(Line(name, ends[0], ends[1], bool(record.get("massive", True))))

    basis = spec.get("basis")
    if basis is not None:
        basis = tuple(tuple(str(v) for v in chi) for chi in basis)
    return Diagram(
        name=str(spec.get("name", "diagram")),
        vertices=tuple(vertices),
        lines=tuple(lines),
        dimension=dim,
        basis=basis,
    )


def loop_number(d: Diagram) -> int:
    return d.n_lines - d.n_vertices + d.components()


def laplacian(d: Diagram) -> List[List[int]]:
    n = d.n_vertices
    lap = [[0] * n for _ in range(n)]
    for line in d.lines:
        if line.is_self_loop:
            continue
        lap[line.a][line.a] += 1
        lap[line.b][line.b] += 1
        lap[line.a][line.b] -= 1
        lap[line.b][line.a] -= 1
    return lap


def _count_components(labels: List[int], lines: Iterable[Line]) -> int:
    """Components left once `lines` join the current label classes."""
    classes = UnionFind(set(labels))
    for line in lines:
        classes.union(labels[line.a], labels[line.b])
    return sum(1 for _ in classes.to_sets())


def spanning_forests(
    d: Diagram, r: int, separate: Optional[Tuple[frozenset, frozenset]] = None
) -> List[EdgeSubset]:
    """All acyclic vertex-spanning line subsets with exactly r components.

    With `separate = (A, B)` no component may hold vertices of both A and B.
    """
    n = d.n_vertices
    need = n - r
    if r < 1 or need < 0:
        return []
    lines = d.lines
    labels = list(range(n))
    chosen: List[int] = []
    found: List[EdgeSubset] = []

    def side(label: int) -> Tuple[bool, bool]:
        members = [v for v in range(n) if labels[v] == label]
        return (
            any(v in separate[0] for v in members),
            any(v in separate[1] for v in members),
        )

    def walk(pos: int):
        if len(chosen) == need:
            found.append(EdgeSubset.of(chosen))
            return
        if len(lines) - pos < need - len(chosen):
            return
        line = lines[pos]
        la, lb = labels[line.a], labels[line.b]
        if la != lb:
            merge_ok = True
            if separate is not None:
                a_in, a_out = side(la)
                b_in, b_out = side(lb)
                merge_ok = not ((a_in or b_in) and (a_out or b_out))
            if merge_ok:
                saved = labels[:]
                for v in range(n):
                    if labels[v] == lb:
                        labels[v] = la
                chosen.append(pos)
                walk(pos + 1)
                chosen.pop()
                labels[:] = saved
        if _count_components(labels, lines[pos + 1:]) <= r:
            walk(pos + 1)

    if _count_components(labels, lines) <= r:
        walk(0)
    return sorted(found)


def spanning_trees(d: Diagram) -> List[EdgeSubset]:
    if not d.is_connected():
        raise DiagramError(f"{d.name} is not connected")
    return spanning_forests(d, 1)


def external_subset(d: Diagram, chi: Iterable[VertexKey]) -> frozenset:
    """Vertex indices of chi, checked to be a non-empty proper subset of externals."""
    members = frozenset(d.vertex_index(v) for v in chi)
    externals = set(d.externals)
    if not members:
        raise DiagramError("chi is empty")
    if not members <= externals:
        bad = sorted(d.vertices[i].name for i in members - externals)
        raise DiagramError(f"chi contains non-external vertices {bad}")
    if members == externals:
        raise DiagramError("chi contains every external vertex")
    return members


def separating_forests(d: Diagram, members: frozenset) -> List[EdgeSubset]:
    """Spanning 2-trees splitting the external vertex indices `members` from the rest."""
    rest = frozenset(d.externals) - members
    return spanning_forests(d, 2, separate=(members, rest))


def spanning_2trees(d: Diagram, chi: Iterable[VertexKey]) -> List[EdgeSubset]:
    return separating_forests(d, external_subset(d, chi))


# corpus builders


def _diagram(name, vertex_names, externals, line_ends, dim, basis=None) -> Diagram:
    return build_diagram(
        {
            "name": name,
            "D": dim,
            "vertices": [{"id": v, "external": v in externals} for v in vertex_names],
            "lines": [
                {"id": f"l{i}", "from": a, "to": b, "massive": True}
                for i, (a, b) in enumerate(line_ends, start=1)
            ],
            "basis": basis,
        }
    )


def build_single_edge(dim: int = 2) -> Diagram:
    return _diagram("single-edge", ["V1", "V2"], {"V1", "V2"}, [("V1", "V2")], dim)


def build_bubble(dim: int = 2) -> Diagram:
    return _diagram(
        "bubble", ["V1", "V2"], {"V1", "V2"}, [("V1", "V2"), ("V1", "V2")], dim
    )


def cyclic_arcs(names: List[str]) -> Tuple[Tuple[str, ...], ...]:
    """Runs of consecutive vertices around a polygon, one per complementary pair.

    Arcs of length 1 .. n/2 starting at every vertex; at length n/2 for even n
    only the first n/2 starts, since the rest are their complements.
    """
    n = len(names)
    arcs = []
    for length in range(1, n // 2 + 1):
        starts = n // 2 if 2 * length == n else n
        for s in range(starts):
            arcs.append(tuple(names[(s + j) % n] for j in range(length)))
    return tuple(arcs)


def build_one_loop(n_points: int, dim: int = 2) -> Diagram:
    """Polygon with every vertex external and every line massive.

    The basis is the set of cyclic arcs: a 2-tree of a polygon cuts it into two
    arcs, so W vanishes for every other chi.
    """
    if n_points < 2:
        raise DiagramError("a one-loop diagram needs at least 2 points")
    names = [f"V{i}" for i in range(1, n_points + 1)]
    ends = [(names[i], names[(i + 1) % n_points]) for i in range(n_points)]
    return _diagram(
        f"one-loop-{n_points}", names, set(names), ends, dim, basis=cyclic_arcs(names)
    )


def build_triangle(dim: int = 2) -> Diagram:
    d = build_one_loop(3, dim)
    return Diagram("triangle", d.vertices, d.lines, d.dimension)


LADDER_BASIS = (("1",), ("2",), ("3",), ("4",), ("1", "2"), ("2", "3"))


def build_ladder(h: int, dim: int = 4) -> Diagram:
    """h-loop ladder: rails u_0..u_h and v_0..v_h joined by rungs u_i - v_i.

    Externals are 1 = u_0, 2 = v_0, 3 = v_h, 4 = u_h. Lines run around the
    outer boundary first (u_0 v_0, bottom rail, v_h u_h, top rail back to u_0)
    and then through the inner rungs, so h = 1 is the cyclic box.
    """
    if not isinstance(h, int) or h < 1:
        raise DiagramError(f"ladder needs h >= 1, got {h!r}")

    def u(i):
        return "1" if i == 0 else "4" if i == h else f"u{i}"

    def v(i):
        return "2" if i == 0 else "3" if i == h else f"v{i}"

    names = ["1", "2", "3", "4"]
    names += [u(i) for i in range(1, h)] + [v(i) for i in range(1, h)]
    ends = [(u(0), v(0))]
    ends += [(v(i), v(i + 1)) for i in range(h)]
    ends += [(v(h), u(h))]
    ends += [(u(i), u(i - 1)) for i in range(h, 0, -1)]
    ends += [(u(i), v(i)) for i in range(1, h)]
    name = "box" if h == 1 else f"ladder-{h}"
    return _diagram(name, names, {"1", "2", "3", "4"}, ends, dim, basis=LADDER_BASIS)
