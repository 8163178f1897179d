"""Quivers, doubled quivers and star-shaped quivers.

Arrow ids are strings.  The reverse of arrow ``"h"`` is ``"h*"`` and the reverse
of ``"h*"`` is ``"h"``, so a base arrow may itself carry a star (this is how a
re-oriented quiver is written down).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ContractViolation

REV = "*"


def reverse_id(h: str) -> str:
    return h[:-1] if h.endswith(REV) else h + REV


@dataclass(frozen=True)
class Arrow:
    id: str
    out: str
    into: str

    def to_json(self):
        return {"id": self.id, "out": self.out, "in": self.into}


class Quiver:
    """A finite quiver ``(I, Omega)``; loops and parallel arrows are allowed."""

    def __init__(self, vertices: Iterable, arrows: Iterable):
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ContractViolation("duplicate vertex names")
        arrs = []
        for a in arrows:
            if isinstance(a, Arrow):
                arrs.append(a)
            elif isinstance(a, dict):
                arrs.append(Arrow(str(a["id"]), str(a["out"]), str(a["in"])))
            else:
                aid, out, into = a
                arrs.append(Arrow(str(aid), str(out), str(into)))
        self.arrows = tuple(arrs)
        ids = [a.id for a in self.arrows]
        if len(set(ids)) != len(ids):
            raise ContractViolation("duplicate arrow ids")
        idset = set(ids)
        vset = set(self.vertices)
        for a in self.arrows:
            if reverse_id(a.id) in idset:
                raise ContractViolation(f"arrow ids {a.id!r} and {reverse_id(a.id)!r} clash")
            if a.out not in vset or a.into not in vset:
                raise ContractViolation(f"arrow {a.id!r} has an endpoint outside the vertex set")

    def __eq__(self, other):
        return isinstance(other, Quiver) and (self.vertices, self.arrows) == (other.vertices, other.arrows)

    def __hash__(self):
        return hash((self.vertices, self.arrows))

    def __repr__(self):
        return f"Quiver(vertices={list(self.vertices)}, arrows={[a.id for a in self.arrows]})"

    def has_loops(self) -> bool:
        return any(a.out == a.into for a in self.arrows)

    def opposite(self) -> "Quiver":
        """Reverse every arrow, renaming ``h`` to its reverse id."""
        return Quiver(self.vertices, [Arrow(reverse_id(a.id), a.into, a.out) for a in self.arrows])

    def is_tree(self) -> bool:
        """Underlying graph connected and acyclic (no loops, no parallel edges)."""
        if self.has_loops() or len(self.arrows) != len(self.vertices) - 1:
            return False
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for a in self.arrows:
            ra, rb = find(a.out), find(a.into)
            if ra == rb:
                return False
            parent[ra] = rb
        return True

    def to_json(self):
        return {"vertices": list(self.vertices), "arrows": [a.to_json() for a in self.arrows]}

    @classmethod
    def from_json(cls, data) -> "Quiver":
        if "arm_lengths" in data:
            return build_star(data["arm_lengths"])
        return cls(data["vertices"], data.get("arrows", []))


class DoubledQuiver:
    """The double ``H = Omega ⊔ Omega-bar`` with its sign and a total order.

    ``eps(h) = +1`` exactly for ``h`` in the base arrows.  ``incoming[i]`` lists
    ``H_i = {h : in(h) = i}`` sorted by the total order.
    """

    def __init__(self, base: Quiver, order: Sequence[str] | None = None):
        self.base = base
        self.vertices = base.vertices
        arrows = {}
        sign = {}
        for a in base.arrows:
            arrows[a.id] = a
            sign[a.id] = 1
            r = Arrow(reverse_id(a.id), a.into, a.out)
            arrows[r.id] = r
            sign[r.id] = -1
        self.arrows = arrows
        self.sign = sign
        canonical = [a.id for a in base.arrows] + [reverse_id(a.id) for a in base.arrows]
        if order is None:
            order = canonical
        order = tuple(str(h) for h in order)
        if sorted(order) != sorted(canonical):
            raise ContractViolation("explicit order is not a total order on the doubled arrow set")
        self.order = order
        self._pos = {h: k for k, h in enumerate(order)}
        incoming = {v: [] for v in self.vertices}
        outgoing = {v: [] for v in self.vertices}
        for h in order:
            incoming[arrows[h].into].append(h)
            outgoing[arrows[h].out].append(h)
        self.incoming = {v: tuple(hs) for v, hs in incoming.items()}
        self.outgoing = {v: tuple(hs) for v, hs in outgoing.items()}

    # basic data -------------------------------------------------------------
    def bar(self, h: str) -> str:
        return reverse_id(h)

    def eps(self, h: str) -> int:
        return self.sign[h]

    def out(self, h: str) -> str:
        return self.arrows[h].out

    def into(self, h: str) -> str:
        return self.arrows[h].into

    def position(self, h: str) -> int:
        return self._pos[h]

    def is_loop(self, h: str) -> bool:
        a = self.arrows[h]
        return a.out == a.into

    def has_loop_at(self, i: str) -> bool:
        return any(self.is_loop(h) for h in self.incoming[i])

    def has_loops(self) -> bool:
        return self.base.has_loops()

    @property
    def positive(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.base.arrows)

    def __iter__(self):
        return iter(self.order)

    def __len__(self):
        return len(self.order)

    def __eq__(self, other):
        return isinstance(other, DoubledQuiver) and self.base == other.base and self.order == other.order

    def __hash__(self):
        return hash((self.base, self.order))

    def __repr__(self):
        return f"DoubledQuiver(vertices={list(self.vertices)}, order={list(self.order)})"

    # order properties -------------------------------------------------------
    def is_canonical(self) -> bool:
        """Every base arrow precedes every reversed arrow."""
        seen_negative = False
        for h in self.order:
            if self.sign[h] < 0:
                seen_negative = True
            elif seen_negative:
                return False
        return True

    def is_canonical_at(self, i: str) -> bool:
        """The order restricted to ``H_i`` puts base arrows first."""
        signs = [self.sign[h] for h in self.incoming[i]]
        return signs == sorted(signs, reverse=True)

    def adjacency(self, i: str, j: str) -> int:
        """Number of ``h`` in ``H`` with ``in(h) = i`` and ``out(h) = j``."""
        return sum(1 for h in self.incoming[i] if self.out(h) == j)

    # re-orientation ---------------------------------------------------------
    def reorient(self, flip: Iterable[str]) -> "DoubledQuiver":
        """Make each listed arrow positive, keeping the total order unchanged."""
        flip = set(flip)
        for h in flip:
            if h not in self.arrows:
                raise ContractViolation(f"unknown arrow {h!r}")
        new_arrows = []
        for a in self.base.arrows:
            r = reverse_id(a.id)
            if r in flip:
                new_arrows.append(Arrow(r, a.into, a.out))
            else:
                new_arrows.append(a)
        return DoubledQuiver(Quiver(self.vertices, new_arrows), self.order)

    def to_json(self):
        data = self.base.to_json()
        data["order"] = list(self.order)
        return data

    @classmethod
    def from_json(cls, data) -> "DoubledQuiver":
        base = Quiver.from_json(data)
        if isinstance(base, StarQuiver) and "order" not in data:
            return base.double()
        return cls(base, data.get("order"))


def double(q: Quiver, order: Sequence[str] | None = None) -> DoubledQuiver:
    """Double ``q``; the default order lists every base arrow before every reverse."""
    return DoubledQuiver(q, order)


class StarQuiver(Quiver):
    """Central vertex ``"0"`` with arms ``"i.l_i" -> ... -> "i.1" -> "0"``.

    The arrow ``"a{i}.{j}"`` goes from ``[i, j+1]`` to ``[i, j]`` (``[i, 0]`` is the
    center); its reverse ``"a{i}.{j}*"`` plays the role of ``b_{i,j}``.
    """

    def __init__(self, arm_lengths: Sequence[int]):
        arm_lengths = tuple(int(l) for l in arm_lengths)
        if not arm_lengths:
            raise ContractViolation("a star quiver needs at least one arm")
        if any(l < 0 for l in arm_lengths):
            raise ContractViolation("arm lengths must be nonnegative")
        self.arm_lengths = arm_lengths
        vertices = ["0"]
        arrows = []
        for i, l in enumerate(arm_lengths, start=1):
            for j in range(1, l + 1):
                vertices.append(self.vertex(i, j))
            for j in range(l):
                arrows.append(Arrow(self.a_id(i, j), self.vertex(i, j + 1), self.vertex(i, j)))
        super().__init__(vertices, arrows)

    @property
    def n_arms(self) -> int:
        return len(self.arm_lengths)

    @staticmethod
    def vertex(i: int, j: int) -> str:
        return "0" if j == 0 else f"{i}.{j}"

    @staticmethod
    def a_id(i: int, j: int) -> str:
        return f"a{i}.{j}"

    @staticmethod
    def b_id(i: int, j: int) -> str:
        return f"a{i}.{j}{REV}"

    def double(self) -> DoubledQuiver:
        return DoubledQuiver(self)

    def to_json(self):
        data = super().to_json()
        data["arm_lengths"] = list(self.arm_lengths)
        return data


def build_star(arm_lengths: Sequence[int]) -> StarQuiver:
    return StarQuiver(arm_lengths)


# small named quivers used throughout the tests and the CLI


def a_n(n: int) -> Quiver:
    """Linear quiver ``1 -> 2 -> ... -> n``."""
    return Quiver([str(k) for k in range(1, n + 1)], [(f"h{k}", str(k), str(k + 1)) for k in range(1, n)])


def jordan() -> Quiver:
    return Quiver(["v"], [("l", "v", "v")])


def kronecker(m: int = 2) -> Quiver:
    return Quiver(["1", "2"], [(f"h{k}", "1", "2") for k in range(1, m + 1)])
