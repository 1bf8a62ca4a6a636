"""Auxiliary functions over an architecture: symmetry, interface sets,
binding endpoint resolution, parent lookup and control levels."""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass
from typing import Optional, Union

from .model import (
    MEMBRANE,
    Architecture,
    Binding,
    Component,
    Content,
    Element,
    Interface,
    Membrane,
    Nature,
    NotFound,
    Path,
    Role,
    itf_segment,
    binding_segment,
)

Target = Union[Path, str, Element]


class Endpoint(enum.Enum):
    SRC = "src"
    DST = "dst"


class ResolutionError(LookupError):
    pass


class UnresolvedEndpoint(ResolutionError):
    pass


class AmbiguousEndpoint(ResolutionError):
    pass


class UnknownComponent(ResolutionError):
    pass


class OrphanContainer(ResolutionError):
    pass


@dataclass(frozen=True)
class ItfRef:
    """An interface together with where it lives.

    Interfaces are plain values, so two components may own equal ones; the
    path tells them apart.  Membrane-side interfaces are synthesized, and
    ``origin`` points at the declared interface they mirror.
    """

    path: Path
    itf: Interface
    origin: Optional[Path] = None

    @property
    def owner(self) -> Path:
        return self.path.parent

    @property
    def membrane_side(self) -> bool:
        return self.owner.last == MEMBRANE and self.owner.kind() == "membrane"

    def __str__(self) -> str:
        return str(self.path)


def sym(itf: Interface) -> Interface:
    """Same interface with the opposite role."""
    return dataclasses.replace(itf, role=itf.role.flipped())


def _declared_refs(path: Path, itfs) -> list[ItfRef]:
    return [ItfRef(path / itf_segment(i.name, i.role), i) for i in itfs]


def membrane_itfs(membrane: Target, arch: Architecture) -> list[ItfRef]:
    """Implicit internal interfaces of a membrane.

    For a composite parent these are the symmetrics of its external and
    content interfaces.  A primitive has no content, so its external
    interfaces stand in for the content side unchanged.
    """
    try:
        mpath = arch.locate(membrane)
    except NotFound:
        raise OrphanContainer("membrane has no recorded parent component") from None

    def compute() -> list[ItfRef]:
        comp = arch.element_at(mpath.parent) if mpath.parent else None
        if not isinstance(comp, Component) or mpath.last != MEMBRANE:
            raise OrphanContainer(f"{mpath} is not a membrane")
        cpath = mpath.parent
        mirrored = [(r.path, sym(r.itf)) for r in _declared_refs(cpath, comp.itfs)]
        if comp.is_composite:
            mirrored += [(r.path, sym(r.itf)) for r in _declared_refs(cpath / "content", comp.content.itfs)]
        else:
            mirrored += [(r.path, r.itf) for r in _declared_refs(cpath, comp.itfs)]
        return [ItfRef(mpath / itf_segment(i.name, i.role), i, origin) for origin, i in mirrored]

    return arch.cached(("membrane_itfs", mpath), compute)


def itf_refs(container: Target, arch: Architecture) -> list[ItfRef]:
    path = arch.locate(container)
    elem = arch.element_at(path)
    if isinstance(elem, Membrane):
        return membrane_itfs(path, arch)
    if isinstance(elem, (Component, Content)):
        return _declared_refs(path, elem.itfs)
    raise TypeError(f"{path} is not a component, content or membrane")


def get_itf(container: Target, arch: Architecture) -> list[Interface]:
    """Interfaces stored by a component, content or membrane."""
    return [r.itf for r in itf_refs(container, arch)]


def _binding_index(scope: Union[Membrane, Content], b: Union[Binding, int]) -> int:
    if isinstance(b, int):
        return b
    for i, other in enumerate(scope.bindings):
        if other is b:
            return i
    return scope.bindings.index(b)


def resolve_endpoint(
    b: Union[Binding, int], container: Target, end: Endpoint, arch: Architecture
) -> ItfRef:
    """Find the interface a binding end designates within its scope.

    ``This.X`` looks among the scope's own interfaces and requires a client
    for the source and a server for the destination; ``Comp.X`` matches the
    external interfaces of sub-component ``Comp`` by name only.
    """
    cpath = arch.locate(container)
    scope = arch.element_at(cpath)
    if not isinstance(scope, (Membrane, Content)):
        raise TypeError(f"{cpath} is not a membrane or content")
    idx = _binding_index(scope, b)
    return _resolve_cached(cpath, idx, end, arch)


def _resolve_cached(cpath: Path, idx: int, end: Endpoint, arch: Architecture) -> ItfRef:
    outcome = arch.cached(("endpoint", cpath, idx, end), lambda: _resolve(cpath, idx, end, arch))
    if isinstance(outcome, ResolutionError):
        raise outcome
    return outcome


def _resolve(cpath: Path, idx: int, end: Endpoint, arch: Architecture):
    scope = arch.element_at(cpath)
    qname = scope.bindings[idx].src if end is Endpoint.SRC else scope.bindings[idx].dst
    if qname.is_this:
        role = Role.CLIENT if end is Endpoint.SRC else Role.SERVER
        candidates = [
            r for r in itf_refs(cpath, arch) if r.itf.name == qname.interface_name and r.itf.role is role
        ]
    else:
        subs = [c for c in scope.components if c.name == qname.container]
        if not subs:
            return UnknownComponent(f"no component named {qname.container!r} in {cpath}")
        if len(subs) > 1:
            return AmbiguousEndpoint(f"several components named {qname.container!r} in {cpath}")
        candidates = [
            r for r in _declared_refs(cpath / subs[0].name, subs[0].itfs) if r.itf.name == qname.interface_name
        ]
    if not candidates:
        return UnresolvedEndpoint(f"no interface matches {qname} in {cpath}")
    if len(candidates) > 1:
        return AmbiguousEndpoint(f"{qname} matches {len(candidates)} interfaces in {cpath}")
    return candidates[0]


def resolve_binding(cpath: Path, idx: int, arch: Architecture):
    """Both ends of binding ``idx`` of a scope, each an ItfRef or a ResolutionError."""
    out = []
    for end in (Endpoint.SRC, Endpoint.DST):
        try:
            out.append(_resolve_cached(cpath, idx, end, arch))
        except ResolutionError as exc:
            out.append(exc)
    return tuple(out)


def binding_path(container: Path, idx: int) -> Path:
    return container / binding_segment(idx)


def parent(target: Target, arch: Architecture) -> Optional[Element]:
    """Enclosing membrane, content or component; None for the root."""
    path = arch.locate(target)
    arch.element_at(path)
    if path == arch.root_path:
        return None
    return arch.element_at(path.parent)


def control_level(x: Union[Target, ItfRef], arch: Architecture) -> int:
    """Control level in {1, 2, 3}; 1 means functional.

    Membrane sub-components that are not interceptors sit at level 2, and a
    non-functional interface is one level above its owner.
    """
    if isinstance(x, ItfRef):
        base = control_level(x.owner, arch)
        return base + 1 if x.itf.nature is Nature.NF else base
    path = arch.locate(x)
    kind = path.kind()
    if kind == "itf":
        itf = arch.element_at(path)
        base = control_level(path.parent, arch)
        return base + 1 if itf.nature is Nature.NF else base
    if kind in ("membrane", "content"):
        return 1
    if kind != "component":
        raise TypeError(f"{path} has no control level")
    if path.parent is not None and path.parent.kind() == "membrane":
        from .interceptors import is_interc  # interceptors builds on this module

        if not is_interc(path, path.parent, arch):
            return 2
    return 1
