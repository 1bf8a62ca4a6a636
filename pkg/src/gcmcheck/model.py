"""Typed, immutable tree for hierarchical component architectures.

A component is either primitive (local methods plus a membrane) or composite
(a membrane plus a content).  Membranes and contents each hold sub-components
and bindings; contents additionally declare internal interfaces.  Elements are
addressed by :class:`Path` values such as ``/Application/content/W1``.
"""

from __future__ import annotations

import enum
import re
import threading
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Iterator, Optional, Union

IDENT_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")
TYPE_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
THIS = "This"
VOID = "void"


class ModelError(ValueError):
    """A model value violates one of its construction invariants."""

    def __init__(self, message: str, span: Optional["SourceSpan"] = None):
        super().__init__(message)
        self.span = span


class NotFound(LookupError):
    pass


class Role(enum.Enum):
    CLIENT = "client"
    SERVER = "server"

    def flipped(self) -> "Role":
        return Role.SERVER if self is Role.CLIENT else Role.CLIENT


class Nature(enum.Enum):
    F = "F"
    NF = "NF"


class Cardinality(enum.Enum):
    SINGLETON = "singleton"
    MULTICAST = "multicast"
    GATHERCAST = "gathercast"


class Kind(enum.Enum):
    PRIMITIVE = "primitive"
    COMPOSITE = "composite"


def is_identifier(text: str) -> bool:
    return bool(IDENT_RE.match(text))


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class MethodSignature:
    method_name: str
    param_type: str
    return_type: str

    def __post_init__(self) -> None:
        if not TYPE_RE.match(self.method_name):
            raise ModelError(f"invalid method name {self.method_name!r}")
        for t in (self.param_type, self.return_type):
            if not TYPE_RE.match(t):
                raise ModelError(f"invalid type name {t!r} in method {self.method_name!r}")

    def __str__(self) -> str:
        return f"{self.method_name}({self.param_type}):{self.return_type}"


@dataclass(frozen=True, eq=False)
class TypeLattice:
    """Declared types and their subtype edges.

    ``void`` is always present and is only related to itself.  The reflexive
    transitive closure of the edges must be a partial order.
    """

    types: tuple[str, ...] = ()
    subtype_edges: tuple[tuple[str, str], ...] = ()
    _supers: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for t in self.types:
            if not TYPE_RE.match(t):
                raise ModelError(f"invalid type name {t!r}")
            if t == VOID or t in seen:
                raise ModelError(f"duplicate type declaration {t!r}")
            seen.add(t)
        graph: dict[str, set[str]] = {t: set() for t in self.types}
        for sub, sup in self.subtype_edges:
            for t in (sub, sup):
                if t not in seen:
                    raise ModelError(f"subtype edge references undeclared type {t!r}")
            if sub != sup:
                graph[sub].add(sup)
        try:
            order = list(TopologicalSorter(graph).static_order())
        except CycleError as exc:
            cycle = " <= ".join(exc.args[1])
            raise ModelError(f"subtype cycle: {cycle}") from None
        # static_order yields supertypes before their subtypes
        supers: dict[str, frozenset[str]] = {VOID: frozenset({VOID})}
        for t in order:
            acc = {t}
            for s in graph[t]:
                acc |= supers[s]
            supers[t] = frozenset(acc)
        object.__setattr__(self, "_supers", supers)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TypeLattice):
            return NotImplemented
        return self.types == other.types and set(self.subtype_edges) == set(other.subtype_edges)

    def __hash__(self) -> int:
        return hash((self.types, frozenset(self.subtype_edges)))

    def declares(self, name: str) -> bool:
        return name in self._supers

    def is_subtype(self, sub: str, sup: str) -> bool:
        return sup in self._supers.get(sub, ())


@dataclass(frozen=True)
class Interface:
    name: str
    role: Role
    nature: Nature = Nature.F
    cardinality: Cardinality = Cardinality.SINGLETON
    signatures: tuple[MethodSignature, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not is_identifier(self.name):
            raise ModelError(f"invalid interface name {self.name!r}", self.span)
        names = [m.method_name for m in self.signatures]
        if len(set(names)) != len(names):
            raise ModelError(f"interface {self.name!r} declares a method name twice", self.span)


def _check_declared_itfs(owner: str, servers, clients) -> None:
    for itfs, role in ((servers, Role.SERVER), (clients, Role.CLIENT)):
        for itf in itfs:
            if itf.role is not role:
                raise ModelError(
                    f"{owner}: interface {itf.name!r} listed as {role.value} but has role {itf.role.value}",
                    itf.span,
                )
            if itf.cardinality is Cardinality.MULTICAST and itf.role is not Role.CLIENT:
                raise ModelError(f"{owner}: multicast interface {itf.name!r} must be a client", itf.span)
            if itf.cardinality is Cardinality.GATHERCAST and itf.role is not Role.SERVER:
                raise ModelError(f"{owner}: gathercast interface {itf.name!r} must be a server", itf.span)


@dataclass(frozen=True)
class QName:
    container: str
    interface_name: str

    def __post_init__(self) -> None:
        if not is_identifier(self.container):
            raise ModelError(f"invalid container token {self.container!r}")
        if not is_identifier(self.interface_name):
            raise ModelError(f"invalid interface name {self.interface_name!r}")

    @property
    def is_this(self) -> bool:
        return self.container == THIS

    @classmethod
    def parse(cls, text: str) -> "QName":
        parts = text.split(".")
        if len(parts) != 2:
            raise ModelError(f"endpoint {text!r} must have the form Container.Interface")
        return cls(parts[0], parts[1])

    def __str__(self) -> str:
        return f"{self.container}.{self.interface_name}"


@dataclass(frozen=True)
class Binding:
    src: QName
    dst: QName
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Membrane:
    components: tuple["Component", ...] = ()
    bindings: tuple[Binding, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Content:
    internal_server_itfs: tuple[Interface, ...] = ()
    internal_client_itfs: tuple[Interface, ...] = ()
    components: tuple["Component", ...] = ()
    bindings: tuple[Binding, ...] = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        _check_declared_itfs("content", self.internal_server_itfs, self.internal_client_itfs)
        for itf in self.itfs:
            if itf.nature is not Nature.F:
                raise ModelError(f"content interface {itf.name!r} must be functional", itf.span)

    @property
    def itfs(self) -> tuple[Interface, ...]:
        return self.internal_server_itfs + self.internal_client_itfs


@dataclass(frozen=True)
class Component:
    name: str
    kind: Kind
    server_itfs: tuple[Interface, ...] = ()
    client_itfs: tuple[Interface, ...] = ()
    membrane: Membrane = field(default_factory=Membrane)
    methods: tuple[MethodSignature, ...] = ()
    content: Optional[Content] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not is_identifier(self.name) or self.name == THIS:
            raise ModelError(f"invalid component name {self.name!r}", self.span)
        _check_declared_itfs(self.name, self.server_itfs, self.client_itfs)
        if self.kind is Kind.PRIMITIVE and self.content is not None:
            raise ModelError(f"primitive {self.name!r} cannot have a content", self.span)
        if self.kind is Kind.COMPOSITE:
            if self.methods:
                raise ModelError(f"composite {self.name!r} cannot declare local methods", self.span)
            if self.content is None:
                object.__setattr__(self, "content", Content())

    @property
    def itfs(self) -> tuple[Interface, ...]:
        return self.server_itfs + self.client_itfs

    @property
    def is_composite(self) -> bool:
        return self.kind is Kind.COMPOSITE


Element = Union[Component, Membrane, Content, Interface, Binding]


# --------------------------------------------------------------------------
# Paths

MEMBRANE = "membrane"
CONTENT = "content"


def itf_segment(name: str, role: Role) -> str:
    return f"itf:{name}:{role.value}"


def binding_segment(index: int) -> str:
    return f"binding:{index}"


def component_segments(components) -> list[str]:
    """Path segment of each sibling; repeated names get an ordinal, e.g. ``W1#2``."""
    seen: dict[str, int] = {}
    out = []
    for comp in components:
        seen[comp.name] = seen.get(comp.name, 0) + 1
        out.append(comp.name if seen[comp.name] == 1 else f"{comp.name}#{seen[comp.name]}")
    return out


def _segment_kind(seg: str) -> str:
    if seg in (MEMBRANE, CONTENT):
        return seg
    if seg.startswith("itf:"):
        parts = seg.split(":")
        if len(parts) != 3 or not is_identifier(parts[1]) or parts[2] not in ("client", "server"):
            raise ValueError(f"malformed interface segment {seg!r}")
        return "itf"
    if seg.startswith("binding:"):
        idx = seg[len("binding:"):]
        if not idx.isdigit():
            raise ValueError(f"malformed binding segment {seg!r}")
        return "binding"
    name, _, ordinal = seg.partition("#")
    if is_identifier(name) and (not ordinal or (ordinal.isdigit() and int(ordinal) >= 2)):
        return "component"
    raise ValueError(f"malformed path segment {seg!r}")


_FOLLOWS = {
    None: {"component"},
    "component": {MEMBRANE, CONTENT, "itf"},
    MEMBRANE: {"component", "itf", "binding"},
    CONTENT: {"component", "itf", "binding"},
    "itf": set(),
    "binding": set(),
}


def _segment_kinds(segments: tuple[str, ...]) -> list[str]:
    kinds: list[str] = []
    prev = None
    for seg in segments:
        kind = _segment_kind(seg)
        # component names are positional: "content" right after a scope is a name
        if kind in (MEMBRANE, CONTENT) and prev in (None, MEMBRANE, CONTENT):
            kind = "component"
        if kind not in _FOLLOWS[prev]:
            raise ValueError(f"segment {seg!r} cannot follow {prev or 'the start'}")
        kinds.append(kind)
        prev = kind
    return kinds


@dataclass(frozen=True, order=True)
class Path:
    """Address of an element, e.g. ``/App/content/W1/itf:S1:server``.

    The empty path denotes the root component.
    """

    segments: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        _segment_kinds(self.segments)

    @classmethod
    def parse(cls, text: str) -> "Path":
        text = text.strip()
        if text in ("", "/"):
            return cls()
        if not text.startswith("/"):
            raise ValueError(f"path {text!r} must start with '/'")
        return cls(tuple(text[1:].split("/")))

    def __truediv__(self, seg: str) -> "Path":
        return Path(self.segments + (seg,))

    def __str__(self) -> str:
        return "/" + "/".join(self.segments) if self.segments else ""

    @property
    def parent(self) -> Optional["Path"]:
        return Path(self.segments[:-1]) if len(self.segments) > 1 else None

    @property
    def last(self) -> str:
        return self.segments[-1] if self.segments else ""

    def kind(self) -> str:
        """One of component/membrane/content/itf/binding, or root for the empty path."""
        return _segment_kinds(self.segments)[-1] if self.segments else "root"


def walk_component(comp: Component, path: Path) -> Iterator[tuple[Path, Element]]:
    """Pre-order traversal: component, external interfaces, membrane, content."""
    yield path, comp
    for itf in comp.itfs:
        yield path / itf_segment(itf.name, itf.role), itf
    mpath = path / MEMBRANE
    yield mpath, comp.membrane
    for i, b in enumerate(comp.membrane.bindings):
        yield mpath / binding_segment(i), b
    for seg, sub in zip(component_segments(comp.membrane.components), comp.membrane.components):
        yield from walk_component(sub, mpath / seg)
    if comp.content is not None:
        cpath = path / CONTENT
        yield cpath, comp.content
        for itf in comp.content.itfs:
            yield cpath / itf_segment(itf.name, itf.role), itf
        for i, b in enumerate(comp.content.bindings):
            yield cpath / binding_segment(i), b
        for seg, sub in zip(component_segments(comp.content.components), comp.content.components):
            yield from walk_component(sub, cpath / seg)


@dataclass(frozen=True)
class Architecture:
    root: Component
    lattice: TypeLattice = field(default_factory=TypeLattice)
    _index: dict = field(init=False, repr=False, compare=False, hash=False)
    _ids: dict = field(init=False, repr=False, compare=False, hash=False)
    _cache: dict = field(init=False, repr=False, compare=False, hash=False)
    _lock: threading.Lock = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        index: dict[Path, Element] = {}
        ids: dict[int, Optional[Path]] = {}
        for path, elem in walk_component(self.root, Path((self.root.name,))):
            index.setdefault(path, elem)
            # an object placed twice in the tree has no unique path
            ids[id(elem)] = None if id(elem) in ids else path
            if isinstance(elem, Interface):
                for sig in elem.signatures:
                    for t in (sig.param_type, sig.return_type):
                        if not self.lattice.declares(t):
                            raise ModelError(
                                f"{path}: method {sig.method_name!r} uses undeclared type {t!r}",
                                elem.span,
                            )
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_ids", ids)
        object.__setattr__(self, "_cache", {})
        object.__setattr__(self, "_lock", threading.Lock())

    @property
    def root_path(self) -> Path:
        return Path((self.root.name,))

    def walk(self) -> Iterator[tuple[Path, Element]]:
        return walk_component(self.root, self.root_path)

    def path_of(self, element: Element) -> Path:
        try:
            path = self._ids[id(element)]
        except KeyError:
            raise NotFound("element does not belong to this architecture") from None
        if path is None:
            raise ValueError("element occurs more than once in the tree; address it by path")
        return path

    def locate(self, target: Union[Path, str, Element]) -> Path:
        """Normalize a path, path string or element of this architecture to a Path."""
        if isinstance(target, Path):
            return target if target.segments else self.root_path
        if isinstance(target, str):
            return self.locate(Path.parse(target))
        return self.path_of(target)

    def element_at(self, path: Union[Path, str]) -> Element:
        return element_at(self, path)

    def cached(self, key, compute):
        """Per-architecture memo; values depend only on the immutable tree."""
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        value = compute()
        with self._lock:
            return self._cache.setdefault(key, value)


def element_at(arch: Architecture, path: Union[Path, str]) -> Element:
    """Return the element addressed by ``path`` or raise :class:`NotFound`.

    Membrane interface paths resolve to the implicit membrane interfaces.
    """
    path = arch.locate(path)
    try:
        return arch._index[path]
    except KeyError:
        pass
    if path.kind() == "itf" and path.parent is not None and path.parent.last == MEMBRANE:
        from .resolve import membrane_itfs  # resolve depends on model

        try:
            for ref in membrane_itfs(path.parent, arch):
                if ref.path == path:
                    return ref.itf
        except NotFound:
            pass
    raise NotFound(str(path))
