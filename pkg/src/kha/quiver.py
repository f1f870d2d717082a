"""Quivers, dimension vectors, bilinear forms and the zeta kernel."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .arith import RationalFunction, qh, rf, t_var, var

__all__ = [
    "Edge", "Quiver", "DimVector", "QuiverConfigError",
    "a1", "a2", "jordan", "edge_free", "load_quiver", "parse_quiver",
]


class QuiverConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    id: str

    @property
    def is_loop(self) -> bool:
        return self.src == self.dst


class DimVector(tuple):
    """Integer vector indexed by the vertices of a quiver, in declaration order."""

    __slots__ = ()

    def __new__(cls, entries: Iterable[int]):
        return tuple.__new__(cls, (int(x) for x in entries))

    def __add__(self, other):
        return DimVector(a + b for a, b in zip(self, other, strict=True))

    def __sub__(self, other):
        return DimVector(a - b for a, b in zip(self, other, strict=True))

    def __neg__(self):
        return DimVector(-a for a in self)

    def __rmul__(self, k: int):
        return DimVector(k * a for a in self)

    def is_nonnegative(self) -> bool:
        return all(a >= 0 for a in self)

    def __repr__(self):
        return f"DimVector({list(self)})"


class Quiver:
    """Directed multigraph with loops; vertices and edges carry string ids."""

    def __init__(self, vertices: Sequence[str], edges: Iterable[Edge | tuple] = ()):
        self.vertices: tuple[str, ...] = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverConfigError("duplicate vertex id")
        es = []
        for e in edges:
            if not isinstance(e, Edge):
                e = Edge(*(str(x) for x in e))
            for end in (e.src, e.dst):
                if end not in self.vertices:
                    raise QuiverConfigError(f"edge {e.id!r} has undeclared endpoint {end!r}")
            es.append(e)
        ids = [e.id for e in es]
        if len(set(ids)) != len(ids):
            raise QuiverConfigError("duplicate edge id")
        self.edges: tuple[Edge, ...] = tuple(es)
        self._pos = {v: n for n, v in enumerate(self.vertices)}

    def __eq__(self, other):
        return isinstance(other, Quiver) and (self.vertices, self.edges) == (other.vertices, other.edges)

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        es = ", ".join(f"{e.src}->{e.dst}:{e.id}" for e in self.edges)
        return f"Quiver({list(self.vertices)}, [{es}])"

    # vectors
    def index(self, i: str) -> int:
        return self._pos[i]

    def vector(self, data: Mapping[str, int] | Sequence[int] | int | None = None) -> DimVector:
        if data is None:
            return DimVector(0 for _ in self.vertices)
        if isinstance(data, int):
            return DimVector(data for _ in self.vertices)
        if isinstance(data, Mapping):
            for k in data:
                if k not in self._pos:
                    raise ValueError(f"unknown vertex {k!r}")
            return DimVector(data.get(v, 0) for v in self.vertices)
        data = list(data)
        if len(data) != len(self.vertices):
            raise ValueError(f"expected {len(self.vertices)} entries, got {len(data)}")
        return DimVector(data)

    def unit(self, i: str) -> DimVector:
        return DimVector(int(v == i) for v in self.vertices)

    def zero(self) -> DimVector:
        return self.vector()

    # edge bookkeeping
    def out_edges(self, i: str) -> list[Edge]:
        """Non-loop edges i -> j."""
        return [e for e in self.edges if e.src == i and not e.is_loop]

    def in_edges(self, i: str) -> list[Edge]:
        """Non-loop edges j -> i."""
        return [e for e in self.edges if e.dst == i and not e.is_loop]

    def loops(self, i: str) -> list[Edge]:
        return [e for e in self.edges if e.is_loop and e.src == i]

    def loop_count(self, i: str) -> int:
        return len(self.loops(i))

    def has_edges(self) -> bool:
        return bool(self.edges)

    # forms
    def dot(self, v: Sequence[int], w: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(v, w, strict=True))

    def euler_form(self, v: Sequence[int], w: Sequence[int]) -> int:
        """<v, w> = v.w - sum over edges i->j of v_i w_j."""
        p = self._pos
        return self.dot(v, w) - sum(v[p[e.src]] * w[p[e.dst]] for e in self.edges)

    def sym_form(self, v: Sequence[int], w: Sequence[int]) -> int:
        return self.euler_form(v, w) + self.euler_form(w, v)

    def dim_nakajima(self, v: Sequence[int], w: Sequence[int]) -> int:
        return 2 * self.dot(w, v) - self.sym_form(v, v)

    # kernels
    def t(self, e: Edge | str) -> RationalFunction:
        return var(t_var(e.id if isinstance(e, Edge) else e))

    def zeta(self, i: str, j: str, x) -> RationalFunction:
        """zeta_ij(x): the shuffle-product kernel, with q = qh**2."""
        x = rf(x)
        out = rf(1)
        if i == j:
            out = (x - qh(2)) / (qh() * (x - 1))
        for e in self.edges:
            te = self.t(e)
            if e.src == i and e.dst == j:
                out = out * qh() * (1 - 1 / (x * te))
            if e.src == j and e.dst == i:
                out = out * (1 - qh(2) * x / te)
        return out

    def gamma(self, i: str) -> RationalFunction:
        out = 1 / (qh() - qh(-1))
        for e in self.loops(i):
            te = self.t(e)
            out = out * (qh() - te * qh(-1)) * (1 - te)
        return out

    def sigma(self, i: str) -> RationalFunction:
        out = rf(1)
        for e in self.loops(i):
            te = self.t(e)
            out = out * (1 - te) * (1 - qh(2) / te)
        return out

    # serialization
    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"src": e.src, "dst": e.dst, "id": e.id} for e in self.edges],
        }


def a1() -> Quiver:
    return Quiver(["1"])


def a2() -> Quiver:
    return Quiver(["1", "2"], [Edge("1", "2", "a")])


def jordan() -> Quiver:
    return Quiver(["1"], [Edge("1", "1", "a")])


def edge_free(n: int) -> Quiver:
    return Quiver([str(k) for k in range(1, n + 1)])


def parse_quiver(data, source: str = "<config>") -> Quiver:
    """Validate a decoded quiver config and build the Quiver."""
    if not isinstance(data, dict):
        raise QuiverConfigError(f"{source}: top level must be an object")
    unknown = set(data) - {"vertices", "edges"}
    if unknown:
        raise QuiverConfigError(f"{source}: unknown field(s) {sorted(unknown)}")
    verts = data.get("vertices")
    if not isinstance(verts, list) or not verts:
        raise QuiverConfigError(f"{source}: field 'vertices' must be a non-empty list")
    for n, v in enumerate(verts):
        if not isinstance(v, str) or not v:
            raise QuiverConfigError(f"{source}: vertices[{n}] must be a non-empty string")
    edges = data.get("edges", [])
    if not isinstance(edges, list):
        raise QuiverConfigError(f"{source}: field 'edges' must be a list")
    built = []
    for n, e in enumerate(edges):
        if not isinstance(e, dict):
            raise QuiverConfigError(f"{source}: edges[{n}] must be an object")
        for key in ("src", "dst", "id"):
            if not isinstance(e.get(key), str) or not e.get(key):
                raise QuiverConfigError(f"{source}: edges[{n}].{key} must be a non-empty string")
        extra = set(e) - {"src", "dst", "id"}
        if extra:
            raise QuiverConfigError(f"{source}: edges[{n}] has unknown field(s) {sorted(extra)}")
        for key in ("src", "dst"):
            if e[key] not in verts:
                raise QuiverConfigError(f"{source}: edges[{n}].{key} = {e[key]!r} is not a declared vertex")
        built.append(Edge(e["src"], e["dst"], e["id"]))
    try:
        return Quiver(verts, built)
    except QuiverConfigError as exc:
        raise QuiverConfigError(f"{source}: {exc}") from None


def load_quiver(path: str | Path) -> Quiver:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise QuiverConfigError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise QuiverConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})") from None
    return parse_quiver(data, str(path))
