"""Interceptor chain recognition inside membranes.

An interceptor chain is a pipeline of membrane sub-components, each with
exactly one functional server and one functional client interface, that
carries functional calls between the parent's external interfaces and its
content (input chains) or the other way round (output chains).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import networkx as nx

from .model import Architecture, Cardinality, Component, Membrane, Nature, Path, Role
from .resolve import (
    ItfRef,
    ResolutionError,
    Target,
    _declared_refs,
    _binding_index,
    resolve_binding,
    sym,
)


class Direction(enum.Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class Chain:
    members: tuple[Path, ...]
    direction: Direction
    entry_itf: Path
    exit_itf: Path


class MembraneView:
    """Resolved bindings and functional interfaces of one membrane."""

    def __init__(self, arch: Architecture, mpath: Path):
        self.arch = arch
        self.path = mpath
        membrane = arch.element_at(mpath)
        if not isinstance(membrane, Membrane):
            raise TypeError(f"{mpath} is not a membrane")
        owner: Component = arch.element_at(mpath.parent)
        self.ext_values = set(owner.itfs)
        self.content_values = set(owner.content.itfs) if owner.is_composite else None

        self.order: list[Path] = []
        self.f_servers: dict[Path, list[ItfRef]] = {}
        self.f_clients: dict[Path, list[ItfRef]] = {}
        for comp in membrane.components:
            cpath = mpath / comp.name
            if cpath in self.f_servers:
                continue
            self.order.append(cpath)
            refs = [r for r in _declared_refs(cpath, comp.itfs) if r.itf.nature is Nature.F]
            self.f_servers[cpath] = [r for r in refs if r.itf.role is Role.SERVER]
            self.f_clients[cpath] = [r for r in refs if r.itf.role is Role.CLIENT]

        # (index, src, dst) for every binding whose two ends resolve
        self.edges: list[tuple[int, ItfRef, ItfRef]] = []
        for idx in range(len(membrane.bindings)):
            src, dst = resolve_binding(mpath, idx, arch)
            if not isinstance(src, ResolutionError) and not isinstance(dst, ResolutionError):
                self.edges.append((idx, src, dst))
        self.pairs = {(s, d) for _, s, d in self.edges}

    def candidate(self, cpath: Path) -> Optional[tuple[ItfRef, ItfRef]]:
        """(SI, CI) when the component has exactly one of each functional kind."""
        servers = self.f_servers.get(cpath)
        clients = self.f_clients.get(cpath)
        if servers is None or len(servers) != 1 or len(clients) != 1:
            return None
        return servers[0], clients[0]

    def ext_end(self, i: ItfRef) -> bool:
        return i.itf.nature is Nature.F and i.owner == self.path and sym(i.itf) in self.ext_values

    def int_end(self, i: ItfRef) -> bool:
        if i.itf.nature is not Nature.F or i.owner != self.path:
            return False
        if self.content_values is not None:
            return sym(i.itf) in self.content_values
        # primitive parent: Sym(I) in Sym(ext)  <=>  I in ext
        return i.itf in self.ext_values

    def entries(self, si: ItfRef, pred) -> list[tuple[int, ItfRef]]:
        return [(idx, s) for idx, s, d in self.edges if d == si and pred(s)]

    def exits(self, ci: ItfRef, pred) -> list[tuple[int, ItfRef]]:
        return [(idx, d) for idx, s, d in self.edges if s == ci and pred(d)]

    def direction(self, first: tuple[ItfRef, ItfRef], last: tuple[ItfRef, ItfRef]) -> Optional[Direction]:
        si, ci = first[0], last[1]
        if self.entries(si, self.ext_end) and self.exits(ci, self.int_end):
            return Direction.INPUT
        if self.entries(si, self.int_end) and self.exits(ci, self.ext_end):
            return Direction.OUTPUT
        return None

    @cached_property
    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for a in self.order:
            ends = self.candidate(a)
            if ends is None:
                continue
            g.add_node(a)
            for b in self.order:
                other = self.candidate(b)
                if other is not None and (ends[1], other[0]) in self.pairs:
                    g.add_edge(a, b)
        return g

    def starts(self, pred) -> list[Path]:
        return [n for n in self.graph if self.entries(self.candidate(n)[0], pred)]

    def ends(self, pred) -> list[Path]:
        return [n for n in self.graph if self.exits(self.candidate(n)[1], pred)]


def membrane_view(membr: Target, arch: Architecture) -> MembraneView:
    mpath = arch.locate(membr)
    return arch.cached(("membrane_view", mpath), lambda: MembraneView(arch, mpath))


def _member_paths(seq: Iterable[Union[Component, Path, str]], view: MembraneView) -> list[Path]:
    out = []
    for item in seq:
        if isinstance(item, str):
            item = view.path / item if "/" not in item else Path.parse(item)
        out.append(view.arch.locate(item))
    return out


def is_ext_end(ci: ItfRef, b, si: ItfRef, membr: Target, i: ItfRef, arch: Architecture) -> bool:
    """Binding ``b`` goes ci -> si and ``i`` mirrors a functional external interface."""
    view = membrane_view(membr, arch)
    return _binding_is(view, b, ci, si) and view.ext_end(i)


def is_int_end(ci: ItfRef, b, si: ItfRef, membr: Target, i: ItfRef, arch: Architecture) -> bool:
    """Binding ``b`` goes ci -> si and ``i`` mirrors a functional content-side interface."""
    view = membrane_view(membr, arch)
    return _binding_is(view, b, ci, si) and view.int_end(i)


def _binding_is(view: MembraneView, b, ci: ItfRef, si: ItfRef) -> bool:
    idx = _binding_index(view.arch.element_at(view.path), b)
    return any(k == idx and s == ci and d == si for k, s, d in view.edges)


def is_interc_chain(
    seq: Sequence[Union[Component, Path, str]], membr: Target, arch: Architecture
) -> Optional[Direction]:
    """Direction of the chain when ``seq`` is an interceptor pipeline, else None.

    Members are components (or their paths / names) of the membrane, in
    call order.  A sequence accepted both ways is reported as input.
    """
    view = membrane_view(membr, arch)
    paths = _member_paths(seq, view)
    if not paths or len(set(paths)) != len(paths):
        return None
    ends = []
    for p in paths:
        if p.parent != view.path:
            return None
        pair = view.candidate(p)
        if pair is None:
            return None
        ends.append(pair)
    for (_, ci), (si, _) in zip(ends, ends[1:]):
        if (ci, si) not in view.pairs:
            return None
    return view.direction(ends[0], ends[-1])


def _maximal(seqs: set[tuple[Path, ...]]) -> list[tuple[Path, ...]]:
    def inside(short, long):
        n = len(short)
        return any(long[k:k + n] == short for k in range(len(long) - n + 1))

    return [s for s in seqs if not any(len(t) > len(s) and inside(s, t) for t in seqs)]


def find_chains(membr: Target, arch: Architecture) -> list[Chain]:
    """Every maximal interceptor chain of a membrane, in declaration order."""
    view = membrane_view(membr, arch)
    return arch.cached(("chains", view.path), lambda: _find_chains(view))


def _find_chains(view: MembraneView) -> list[Chain]:
    g = view.graph
    accepted: set[tuple[Path, ...]] = set()
    for start_pred, end_pred in ((view.ext_end, view.int_end), (view.int_end, view.ext_end)):
        ends = set(view.ends(end_pred))
        for s in view.starts(start_pred):
            if s in ends:
                accepted.add((s,))
            for p in nx.all_simple_paths(g, s, ends - {s}):
                accepted.add(tuple(p))

    rank = {p: k for k, p in enumerate(view.order)}
    chains = []
    for members in sorted(_maximal(accepted), key=lambda m: [rank[p] for p in m]):
        first, last = view.candidate(members[0]), view.candidate(members[-1])
        direction = view.direction(first, last)
        start_pred, end_pred = (
            (view.ext_end, view.int_end) if direction is Direction.INPUT else (view.int_end, view.ext_end)
        )
        entry = view.entries(first[0], start_pred)[0][1]
        exit_ = view.exits(last[1], end_pred)[0][1]
        chains.append(Chain(members, direction, entry.path, exit_.path))
    return chains


def interceptors(membr: Target, arch: Architecture) -> frozenset[Path]:
    return frozenset(p for c in find_chains(membr, arch) for p in c.members)


def is_interc(comp: Union[Component, Path, str], membr: Target, arch: Architecture) -> bool:
    """True when some interceptor chain of the membrane contains the component."""
    view = membrane_view(membr, arch)
    (path,) = _member_paths([comp], view)
    return path in interceptors(view.path, arch)


def candidate_cycles(membr: Target, arch: Architecture) -> list[list[Path]]:
    """Cycles among chain candidates reachable from a chain entry."""
    view = membrane_view(membr, arch)
    g = view.graph
    reach: set[Path] = set()
    for s in view.starts(view.ext_end) + view.starts(view.int_end):
        reach |= {s} | nx.descendants(g, s)
    sub = g.subgraph(reach)
    rank = {p: k for k, p in enumerate(view.order)}
    cycles = []
    for scc in nx.strongly_connected_components(sub):
        if len(scc) > 1 or any(sub.has_edge(n, n) for n in scc):
            cycles.append(sorted(scc, key=rank.get))
    return sorted(cycles, key=lambda c: rank[c[0]])


def non_singleton_members(chain: Chain, membr: Target, arch: Architecture) -> list[ItfRef]:
    """Functional interfaces of chain members whose cardinality is not singleton."""
    view = membrane_view(membr, arch)
    out = []
    for p in chain.members:
        for ref in view.candidate(p):
            if ref.itf.cardinality is not Cardinality.SINGLETON:
                out.append(ref)
    return out
