"""Well-formedness predicates and the recursive WF judgment.

Every predicate returns a list of :class:`Violation`; ``wf`` walks the tree
in pre-order and accumulates them instead of stopping at the first failure.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence, Union

from .interceptors import candidate_cycles, find_chains, non_singleton_members
from .model import (
    MEMBRANE,
    Architecture,
    Binding,
    Cardinality,
    Component,
    Content,
    Interface,
    Membrane,
    Path,
    Role,
    TypeLattice,
    component_segments,
    itf_segment,
)
from .resolve import (
    AmbiguousEndpoint,
    ItfRef,
    ResolutionError,
    Target,
    UnknownComponent,
    _binding_index,
    binding_path,
    control_level,
    membrane_itfs,
    resolve_binding,
)

CODES = (
    "E_DUP_COMP",
    "E_DUP_ITF",
    "E_DUP_ITF_ROLE",
    "E_BIND_ROLE",
    "E_BIND_TYPE",
    "E_BIND_CARD",
    "E_BIND_NATURE",
    "E_UNRESOLVED",
    "E_UNKNOWN_COMP",
    "E_INTERC_SHAPE",
)
WARN_UNBOUND = "W_UNBOUND_CLIENT"


@dataclass(frozen=True)
class Violation:
    code: str
    path: Path
    message: str
    related: Optional[Path] = None

    def to_dict(self) -> dict:
        out = {"code": self.code, "path": str(self.path), "message": self.message}
        if self.related is not None:
            out["related"] = str(self.related)
        return out

    def __str__(self) -> str:
        return f"{self.code} {self.path} {self.message}"


@dataclass
class DiagnosticReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[Violation] = field(default_factory=list)

    @property
    def well_formed(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> list[str]:
        return [v.code for v in self.violations]

    def to_dict(self) -> dict:
        return {
            "well_formed": self.well_formed,
            "violations": [v.to_dict() for v in self.violations],
            "warnings": [v.to_dict() for v in self.warnings],
        }


# --------------------------------------------------------------------------
# naming

def unique_comp_names(comps: Sequence[Component], scope: Path) -> list[Violation]:
    out = []
    placed = list(zip(component_segments(comps), comps))
    for (sa, a), (sb, b) in combinations(placed, 2):
        if a.name == b.name:
            out.append(Violation("E_DUP_COMP", scope / sb, f"duplicate component name {b.name!r}", scope / sa))
    return out


def unique_itf_names(itfs: Sequence[Interface], scope: Path) -> list[Violation]:
    out = []
    for a, b in combinations(itfs, 2):
        if a.name == b.name:
            out.append(
                Violation(
                    "E_DUP_ITF",
                    scope / itf_segment(b.name, b.role),
                    f"duplicate interface name {b.name!r} ({a.role.value} and {b.role.value})",
                    scope / itf_segment(a.name, a.role),
                )
            )
    return out


def unique_names_and_roles(itfs: Sequence[Interface], scope: Path) -> list[Violation]:
    """Same-name membrane interfaces are allowed only with opposite roles."""
    out = []
    for a, b in combinations(itfs, 2):
        if a.name == b.name and a.role is b.role:
            out.append(
                Violation(
                    "E_DUP_ITF_ROLE",
                    scope,
                    f"two membrane interfaces named {a.name!r} are both {a.role.value}s",
                )
            )
    return out


# --------------------------------------------------------------------------
# bindings

def signatures_compatible(
    client: Interface, server: Interface, lattice: TypeLattice, exact: bool = False
) -> list[str]:
    """Reasons why the server cannot serve every client method; empty if it can.

    A server method may accept a supertype of the client's parameter and
    return a subtype of the client's expected result.
    """
    if exact:
        missing = set(client.signatures) ^ set(server.signatures)
        return [f"signature sets differ on {', '.join(sorted(map(str, missing)))}"] if missing else []
    offered = {m.method_name: m for m in server.signatures}
    problems = []
    for m in client.signatures:
        s = offered.get(m.method_name)
        if s is None:
            problems.append(f"server lacks method {m.method_name!r}")
            continue
        if not lattice.is_subtype(m.param_type, s.param_type):
            problems.append(f"{m.method_name}: parameter {m.param_type} is not a subtype of {s.param_type}")
        if not lattice.is_subtype(s.return_type, m.return_type):
            problems.append(f"{m.method_name}: result {s.return_type} is not a subtype of {m.return_type}")
    return problems


def _roles(bpath: Path, b: Binding, src: ItfRef, dst: ItfRef) -> list[Violation]:
    if src.itf.role is Role.CLIENT and dst.itf.role is Role.SERVER:
        return []
    return [
        Violation(
            "E_BIND_ROLE",
            bpath,
            f"binding {b.src} -> {b.dst} goes from a {src.itf.role.value} to a {dst.itf.role.value}",
            dst.path,
        )
    ]


def _types(bpath: Path, b: Binding, src: ItfRef, dst: ItfRef, lattice: TypeLattice, exact: bool):
    problems = signatures_compatible(src.itf, dst.itf, lattice, exact)
    if not problems:
        return []
    return [
        Violation(
            "E_BIND_TYPE",
            bpath,
            f"incompatible types {b.src} -> {b.dst}: {'; '.join(problems)}",
            dst.path,
        )
    ]


def _nature(bpath: Path, b: Binding, src: ItfRef, dst: ItfRef, arch: Architecture):
    a, d = control_level(src, arch), control_level(dst, arch)
    if (a == 1 and d == 1) or (a > 1 and d > 1):
        return []
    return [
        Violation(
            "E_BIND_NATURE",
            bpath,
            f"binding {b.src} -> {b.dst} connects control levels {a} and {d}",
            dst.path,
        )
    ]


def _resolved(container: Target, b, arch: Architecture):
    cpath = arch.locate(container)
    scope = arch.element_at(cpath)
    idx = _binding_index(scope, b)
    src, dst = resolve_binding(cpath, idx, arch)
    if isinstance(src, ResolutionError) or isinstance(dst, ResolutionError):
        return None
    return binding_path(cpath, idx), scope.bindings[idx], src, dst


def binding_roles(b: Union[Binding, int], container: Target, arch: Architecture) -> list[Violation]:
    r = _resolved(container, b, arch)
    return _roles(*r) if r else []


def binding_types(
    b: Union[Binding, int], container: Target, arch: Architecture, exact: bool = False
) -> list[Violation]:
    r = _resolved(container, b, arch)
    return _types(*r, arch.lattice, exact) if r else []


def binding_nature(b: Union[Binding, int], container: Target, arch: Architecture) -> list[Violation]:
    r = _resolved(container, b, arch)
    return _nature(*r, arch) if r else []


def card_validity(
    container: Target,
    arch: Architecture,
    multicast_mode: bool = True,
    bindings: Optional[Iterable[Union[Binding, int]]] = None,
) -> list[Violation]:
    """Bindings of a scope that share a source interface.

    Without multicast every shared source is an error; with it, sharing is
    allowed only from a multicast interface.
    """
    cpath = arch.locate(container)
    scope = arch.element_at(cpath)
    indices = range(len(scope.bindings)) if bindings is None else [_binding_index(scope, b) for b in bindings]
    by_src: dict[ItfRef, list[int]] = defaultdict(list)
    for idx in indices:
        src, dst = resolve_binding(cpath, idx, arch)
        if not isinstance(src, ResolutionError) and not isinstance(dst, ResolutionError):
            by_src[src].append(idx)
    out = []
    for src, idxs in by_src.items():
        if multicast_mode and src.itf.cardinality is Cardinality.MULTICAST:
            continue
        for first, second in combinations(idxs, 2):
            out.append(
                Violation(
                    "E_BIND_CARD",
                    binding_path(cpath, second),
                    f"{src.itf.cardinality.value} client {scope.bindings[second].src} "
                    f"is also the source of binding {first}",
                    binding_path(cpath, first),
                )
            )
    return out


# --------------------------------------------------------------------------
# WF

@dataclass(frozen=True)
class CheckOptions:
    multicast_mode: bool = True
    exact_types: bool = False
    warn_unbound: bool = False


class _Checker:
    def __init__(self, arch: Architecture, options: CheckOptions):
        self.arch = arch
        self.opts = options
        self.report = DiagnosticReport()

    def emit(self, violations: Iterable[Violation]) -> None:
        self.report.violations.extend(violations)

    def component(self, path: Path, comp: Component) -> None:
        self.emit(unique_itf_names(comp.itfs, path))
        self.scope(path / MEMBRANE, comp.membrane)
        if comp.is_composite:
            self.scope(path / "content", comp.content)

    def scope(self, spath: Path, scope: Union[Membrane, Content]) -> None:
        is_membrane = isinstance(scope, Membrane)
        if not is_membrane:
            self.emit(unique_itf_names(scope.itfs, spath))
        self.emit(unique_comp_names(scope.components, spath))
        if is_membrane:
            self.emit(unique_names_and_roles([r.itf for r in membrane_itfs(spath, self.arch)], spath))
            self.interceptor_shape(spath)

        bound_sources: set[ItfRef] = set()
        for idx, b in enumerate(scope.bindings):
            bpath = binding_path(spath, idx)
            src, dst = resolve_binding(spath, idx, self.arch)
            failed = False
            for end, qname in ((src, b.src), (dst, b.dst)):
                if isinstance(end, UnknownComponent):
                    self.emit([Violation("E_UNKNOWN_COMP", bpath, f"unknown component in endpoint {qname}: {end}")])
                    failed = True
                elif isinstance(end, ResolutionError):
                    kind = "ambiguous" if isinstance(end, AmbiguousEndpoint) else "unresolved"
                    self.emit([Violation("E_UNRESOLVED", bpath, f"{kind} endpoint {qname}: {end}")])
                    failed = True
            if failed:
                continue
            bound_sources.add(src)
            self.emit(_roles(bpath, b, src, dst))
            self.emit(_types(bpath, b, src, dst, self.arch.lattice, self.opts.exact_types))
            self.emit(_nature(bpath, b, src, dst, self.arch))
        self.emit(card_validity(spath, self.arch, self.opts.multicast_mode))

        if self.opts.warn_unbound:
            self.unbound(spath, scope, bound_sources)
        for seg, sub in zip(component_segments(scope.components), scope.components):
            self.component(spath / seg, sub)

    def interceptor_shape(self, mpath: Path) -> None:
        for cycle in candidate_cycles(mpath, self.arch):
            names = " -> ".join(p.last for p in cycle)
            self.emit([Violation("E_INTERC_SHAPE", mpath, f"interceptor candidates form a cycle: {names}", cycle[0])])
        for chain in find_chains(mpath, self.arch):
            for ref in non_singleton_members(chain, mpath, self.arch):
                self.emit(
                    [
                        Violation(
                            "E_INTERC_SHAPE",
                            ref.path,
                            f"interceptor {ref.owner.last!r} has a {ref.itf.cardinality.value} "
                            f"functional interface {ref.itf.name!r}",
                            ref.owner,
                        )
                    ]
                )

    def unbound(self, spath: Path, scope, bound: set[ItfRef]) -> None:
        refs = []
        if isinstance(scope, Content):
            refs += [ItfRef(spath / itf_segment(i.name, i.role), i) for i in scope.internal_client_itfs]
        for seg, sub in zip(component_segments(scope.components), scope.components):
            refs += [ItfRef(spath / seg / itf_segment(i.name, i.role), i) for i in sub.client_itfs]
        for ref in refs:
            if ref not in bound:
                self.report.warnings.append(
                    Violation(WARN_UNBOUND, ref.path, f"client interface {ref.itf.name!r} is not bound")
                )


def wf(
    comp: Target,
    arch: Architecture,
    *,
    multicast_mode: bool = True,
    exact_types: bool = False,
    warn_unbound: bool = False,
) -> DiagnosticReport:
    """Check a component and everything beneath it."""
    path = arch.locate(comp)
    element = arch.element_at(path)
    if not isinstance(element, Component):
        raise TypeError(f"{path} is not a component")
    checker = _Checker(arch, CheckOptions(multicast_mode, exact_types, warn_unbound))
    checker.component(path, element)
    return checker.report


def check(arch: Architecture, **options) -> DiagnosticReport:
    return wf(arch.root_path, arch, **options)
