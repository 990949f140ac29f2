"""Exact Kochen-Specker engine: ray sets, orthogonality graphs, basis cliques,
and exhaustive search for noncontextual {0,1} value assignments.

A "basis" is any clique of ``dim`` mutually orthogonal rays present in the
data; every such clique constrains colorings, not just a curated list. A
valid coloring gives each complete basis exactly one 1 and never values two
orthogonal rays 1 together, the latter because an orthogonal pair extends
to a complete basis of the Hilbert space whether or not the completing ray
is in the data.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .qcore import QuantExt, Ray, ray_dot

DEFAULT_BUDGET = 100_000_000

COLORABLE = "colorable"
UNCOLORABLE = "uncolorable"
BUDGET_EXHAUSTED = "budget-exhausted"

_INT_RE = re.compile(r"^[+-]?\d+$")
_PAIR_RE = re.compile(r"^([+-]?\d+)([+-]\d+)$")


class RayFileError(ValueError):
    """Malformed ray file, with the offending 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class RaySet:
    """Projectively deduplicated rays with their exact orthogonality structure.

    ``ortho[i]`` holds the indices orthogonal to ray i; ``bases`` lists every
    size-``dim`` clique of the orthogonality graph in sorted order;
    ``free_rays`` are rays that occur in no complete basis, so no constraint
    ever forces them to 1.
    """

    dim: int
    rays: tuple[Ray, ...]
    ortho: tuple[frozenset[int], ...]
    bases: tuple[tuple[int, ...], ...]
    free_rays: tuple[int, ...]

    @property
    def constrained_rays(self) -> tuple[int, ...]:
        free = set(self.free_rays)
        return tuple(i for i in range(len(self.rays)) if i not in free)

    def bases_of_ray(self, ray_id: int) -> tuple[int, ...]:
        return tuple(bi for bi, basis in enumerate(self.bases) if ray_id in basis)


@dataclass(frozen=True)
class Coloring:
    """Total {0,1} assignment over a ray set, indexed by ray id.

    Validity demands two things of an assignment: every complete basis holds
    exactly one ray valued 1, and no two orthogonal rays are both valued 1.
    The pair rule carries the weight of quantification over arbitrary
    orthonormal bases: an orthogonal pair always extends to a complete basis
    of the Hilbert space even when the completing ray is absent from the
    data, so a double 1 is never value-consistent. Noncontextuality is
    structural: a ray shared between bases has the one value stored here,
    whichever basis it is read through.
    """

    values: tuple[int, ...]

    def value(self, ray_id: int) -> int:
        return self.values[ray_id]


@dataclass(frozen=True)
class ColoringCheck:
    """Replay result: indices of bases summing to != 1 and orthogonal pairs
    with both members valued 1."""

    ok: bool
    violated_bases: tuple[int, ...]
    violated_pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SearchStats:
    nodes: int
    propagations: int


@dataclass(frozen=True)
class ColorabilityCertificate:
    """Search outcome; ``budget-exhausted`` is never conflated with uncolorable."""

    verdict: str
    witness: Coloring | None
    stats: SearchStats
    budget: int


@dataclass(frozen=True)
class CountResult:
    """Exact enumeration result; ``capped`` means the count reached the cap
    and enumeration stopped, so the true count is >= ``count``."""

    count: int
    capped: bool
    witnesses: tuple[Coloring, ...] | None
    stats: SearchStats
    exhausted: bool


def _parse_ray_line(tokens: list[str], line: int) -> list[QuantExt]:
    coords: list[QuantExt] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if i + 1 < len(tokens) and tokens[i + 1] == "r2":
            # "a+b r2" puts the second integer on the sqrt(2) axis
            m = _PAIR_RE.match(tok)
            if m:
                coords.append(QuantExt(int(m.group(1)), int(m.group(2))))
            elif _INT_RE.match(tok):
                # bare "b r2" shorthand for 0 + b*sqrt(2)
                coords.append(QuantExt(0, int(tok)))
            else:
                raise RayFileError(line, f"bad coordinate literal {tok!r}")
            i += 2
        elif _INT_RE.match(tok):
            coords.append(QuantExt(int(tok), 0))
            i += 1
        else:
            raise RayFileError(line, f"bad coordinate literal {tok!r}")
    return coords


def parse_ray_file(source: str | Path) -> tuple[int, list[list[QuantExt]]]:
    """Read a ray file: a ``dim <d>`` header then one ray per line.

    Coordinates are exact Z[sqrt(2)] literals, ``a`` or ``a+b r2`` / ``a-b r2``;
    ``#`` starts a comment. Returns the dimension and the raw coordinate rows.
    """
    if isinstance(source, Path):
        text = source.read_text()
    elif "\n" not in source and Path(source).exists():
        text = Path(source).read_text()
    else:
        text = source

    dim: int | None = None
    rows: list[list[QuantExt]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        tokens = content.split()
        if dim is None:
            if tokens[0] != "dim" or len(tokens) != 2 or not tokens[1].isdigit():
                raise RayFileError(lineno, "expected header 'dim <d>'")
            dim = int(tokens[1])
            if dim < 2:
                raise RayFileError(lineno, f"dimension must be >= 2, got {dim}")
            continue
        coords = _parse_ray_line(tokens, lineno)
        if len(coords) != dim:
            raise RayFileError(
                lineno, f"expected {dim} coordinates, got {len(coords)}"
            )
        if all(c.is_zero() for c in coords):
            raise RayFileError(lineno, "zero ray")
        rows.append(coords)
    if dim is None:
        raise RayFileError(1, "empty ray file (no 'dim <d>' header)")
    if not rows:
        raise RayFileError(1, "ray file declares no rays")
    return dim, rows


def serialize_ray(coords) -> str:
    return " ".join(str(c) for c in coords)


def _enumerate_cliques(n: int, ortho: list[set[int]], size: int) -> list[tuple[int, ...]]:
    """All cliques of the given size, each sorted, list in lexicographic order."""
    out: list[tuple[int, ...]] = []

    def extend(clique: list[int], candidates: list[int]) -> None:
        if len(clique) == size:
            out.append(tuple(clique))
            return
        for idx, v in enumerate(candidates):
            nxt = [w for w in candidates[idx + 1 :] if w in ortho[v]]
            clique.append(v)
            extend(clique, nxt)
            clique.pop()

    extend([], list(range(n)))
    return out


def build_rayset(
    dim: int,
    coords: list[list[QuantExt]],
    on_free_rays: str = "keep",
) -> RaySet:
    """Deduplicate rows projectively, derive orthogonality exactly, and
    enumerate every dim-clique as a basis.

    ``on_free_rays`` is "keep" (flag rays lying in no basis) or "error".
    """
    if on_free_rays not in ("keep", "error"):
        raise ValueError(f"on_free_rays must be 'keep' or 'error', got {on_free_rays!r}")
    rays: list[Ray] = []
    for rowno, row in enumerate(coords, start=1):
        if len(row) != dim:
            raise ValueError(f"row {rowno}: expected {dim} coordinates, got {len(row)}")
        candidate = Ray(tuple(row))
        if any(candidate.projectively_equal(r) for r in rays):
            continue
        rays.append(Ray(tuple(row), id=len(rays)))

    n = len(rays)
    ortho_sets: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if ray_dot(rays[i], rays[j]).is_zero():
                ortho_sets[i].add(j)
                ortho_sets[j].add(i)

    bases = _enumerate_cliques(n, ortho_sets, dim)
    in_basis = {r for basis in bases for r in basis}
    free = tuple(i for i in range(n) if i not in in_basis)
    if free and on_free_rays == "error":
        raise ValueError(f"rays in no complete basis: {list(free)}")

    return RaySet(
        dim=dim,
        rays=tuple(rays),
        ortho=tuple(frozenset(s) for s in ortho_sets),
        bases=tuple(bases),
        free_rays=free,
    )


def load_rayset(source: str | Path, on_free_rays: str = "keep") -> RaySet:
    dim, rows = parse_ray_file(source)
    return build_rayset(dim, rows, on_free_rays=on_free_rays)


def bundled_ray_names() -> tuple[str, ...]:
    return ("peres33", "cabello18", "qubit2")


def bundled_ray_text(name: str) -> str:
    """Text of a bundled ray file; accepts 'peres33' or 'peres33.rays'."""
    stem = name[: -len(".rays")] if name.endswith(".rays") else name
    if stem not in bundled_ray_names():
        raise ValueError(f"no bundled ray set named {name!r}")
    return resources.files("onticlab").joinpath("data", f"{stem}.rays").read_text()


def verify_coloring(rs: RaySet, coloring: Coloring) -> ColoringCheck:
    """Replay both coloring rules against a total assignment.

    Violations come back as basis indices and ray-id pairs rather than a
    bare flag so a failed replay localizes itself.
    """
    if len(coloring.values) != len(rs.rays):
        raise ValueError(
            f"partial assignment: {len(coloring.values)} values for {len(rs.rays)} rays"
        )
    if any(v not in (0, 1) for v in coloring.values):
        raise ValueError("assignment values must be 0 or 1")
    violated_bases = tuple(
        bi
        for bi, basis in enumerate(rs.bases)
        if sum(coloring.values[r] for r in basis) != 1
    )
    violated_pairs = tuple(
        (i, j)
        for i in range(len(rs.rays))
        if coloring.values[i] == 1
        for j in sorted(rs.ortho[i])
        if j > i and coloring.values[j] == 1
    )
    ok = not violated_bases and not violated_pairs
    return ColoringCheck(
        ok=ok, violated_bases=violated_bases, violated_pairs=violated_pairs
    )


class _Searcher:
    """Backtracking with unit propagation over both coloring rules.

    Branch order is frozen to (descending orthogonality degree, ray index)
    with value 1 tried before 0, so node and propagation counts are
    reproducible. Rays in no basis are pinned to 0 up front; that loses no
    verdicts because flipping a 1 to 0 on such a ray never breaks a basis
    sum and only relaxes pair constraints.
    """

    STOP = object()

    def __init__(self, rs: RaySet, budget: int, propagate: bool):
        self.rs = rs
        self.budget = budget
        self.use_propagation = propagate
        n = len(rs.rays)
        self.values: list[int | None] = [None] * n
        self.ray_bases: list[list[int]] = [[] for _ in range(n)]
        for bi, basis in enumerate(rs.bases):
            for r in basis:
                self.ray_bases[r].append(bi)
        self.neighbors = tuple(tuple(sorted(s)) for s in rs.ortho)
        self.ones = [0] * len(rs.bases)
        self.zeros = [0] * len(rs.bases)
        self.order = sorted(rs.constrained_rays, key=lambda i: (-len(rs.ortho[i]), i))
        self.nodes = 0
        self.propagations = 0
        self.budget_hit = False
        self.trail: list[int] = []
        for i in rs.free_rays:
            self.values[i] = 0

    def _assign(self, ray: int, value: int) -> bool:
        """Set a ray then run forced consequences; False on conflict."""
        queue: list[tuple[int, int]] = [(ray, value)]
        qi = 0
        while qi < len(queue):
            r, v = queue[qi]
            qi += 1
            current = self.values[r]
            if current is not None:
                if current != v:
                    return False
                continue
            self.values[r] = v
            self.trail.append(r)
            # counters for every owning basis must update before any conflict
            # exit, or the symmetric undo would corrupt them
            conflict = False
            if v == 1:
                for s in self.neighbors[r]:
                    if self.values[s] == 1:
                        conflict = True
                    elif self.use_propagation and self.values[s] is None:
                        queue.append((s, 0))
                        self.propagations += 1
                for bi in self.ray_bases[r]:
                    self.ones[bi] += 1
            else:
                for bi in self.ray_bases[r]:
                    basis = self.rs.bases[bi]
                    size = len(basis)
                    self.zeros[bi] += 1
                    if self.zeros[bi] == size:
                        conflict = True
                    elif (
                        self.use_propagation
                        and self.ones[bi] == 0
                        and self.zeros[bi] == size - 1
                    ):
                        for s in basis:
                            if self.values[s] is None:
                                queue.append((s, 1))
                                self.propagations += 1
                                break
            if conflict:
                return False
        return True

    def _undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            r = self.trail.pop()
            v = self.values[r]
            self.values[r] = None
            for bi in self.ray_bases[r]:
                if v == 1:
                    self.ones[bi] -= 1
                else:
                    self.zeros[bi] -= 1

    def run(self, on_solution) -> None:
        """Depth-first over the frozen order; ``on_solution`` returns STOP to halt."""
        self._dfs(0, on_solution)

    def _dfs(self, pos: int, on_solution):
        values = self.values
        order = self.order
        while pos < len(order) and values[order[pos]] is not None:
            pos += 1
        if pos == len(order):
            return on_solution(tuple(v if v is not None else 0 for v in values))
        ray = order[pos]
        for value in (1, 0):
            if self.nodes >= self.budget:
                self.budget_hit = True
                return self.STOP
            self.nodes += 1
            mark = len(self.trail)
            if self._assign(ray, value):
                result = self._dfs(pos + 1, on_solution)
                if result is self.STOP:
                    return self.STOP
            self._undo(mark)
        return None

    def stats(self) -> SearchStats:
        return SearchStats(nodes=self.nodes, propagations=self.propagations)


def search_coloring(
    rs: RaySet,
    budget: int = DEFAULT_BUDGET,
    propagate: bool = True,
) -> ColorabilityCertificate:
    """Complete backtracking decision: colorable with witness, uncolorable,
    or budget-exhausted (an explicitly inconclusive verdict)."""
    searcher = _Searcher(rs, budget, propagate)
    found: list[Coloring] = []

    def on_solution(values: tuple[int, ...]):
        found.append(Coloring(values))
        return _Searcher.STOP

    searcher.run(on_solution)
    if found:
        verdict, witness = COLORABLE, found[0]
    elif searcher.budget_hit:
        verdict, witness = BUDGET_EXHAUSTED, None
    else:
        verdict, witness = UNCOLORABLE, None
    return ColorabilityCertificate(
        verdict=verdict, witness=witness, stats=searcher.stats(), budget=budget
    )


def count_colorings(
    rs: RaySet,
    cap: int = 100_000,
    collect: bool = False,
    budget: int = DEFAULT_BUDGET,
    propagate: bool = True,
) -> CountResult:
    """Count distinct valid colorings exactly, stopping at ``cap``.

    Free rays are pinned to 0, so the count is over constrained assignments.
    With ``collect`` the witnesses themselves are returned (sorted) whenever
    enumeration finished below the cap.
    """
    searcher = _Searcher(rs, budget, propagate)
    seen: list[Coloring] = []
    counter = [0]

    def on_solution(values: tuple[int, ...]):
        counter[0] += 1
        if collect:
            seen.append(Coloring(values))
        if counter[0] >= cap:
            return _Searcher.STOP
        return None

    searcher.run(on_solution)
    capped = counter[0] >= cap
    witnesses = None
    if collect and not capped and not searcher.budget_hit:
        witnesses = tuple(sorted(seen, key=lambda c: c.values))
    return CountResult(
        count=counter[0],
        capped=capped,
        witnesses=witnesses,
        stats=searcher.stats(),
        exhausted=searcher.budget_hit,
    )
