"""Loader for the JSON architecture description format.

Top level::

    {"types": ["Request", {"name": "Partial", "extends": ["Result"]}],
     "root": {"name": "App", "kind": "composite", ...}}

Only syntax and arity problems are reported here; semantic rules are left to
:mod:`gcmcheck.check`.
"""

from __future__ import annotations

import json
import re
from typing import Any, Optional

from ..model import (
    Architecture,
    Binding,
    Cardinality,
    Component,
    Content,
    Interface,
    Kind,
    Membrane,
    MethodSignature,
    ModelError,
    Nature,
    QName,
    Role,
    SourceSpan,
    TypeLattice,
)
from ._spans import LocatedDict, SpanDecoder, key_span, span_at, span_of

SIGNATURE_RE = re.compile(
    r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*\(\s*([A-Za-z][A-Za-z0-9_]*)\s*\)\s*:\s*([A-Za-z][A-Za-z0-9_]*)\s*$"
)

ROLES = {r.value: r for r in Role}
NATURES = {n.value: n for n in Nature}
CARDINALITIES = {c.value: c for c in Cardinality}
KINDS = {k.value: k for k in Kind}


class LoadError(ValueError):
    def __init__(self, message: str, span: Optional[SourceSpan] = None):
        self.span = span or SourceSpan(1, 1, 0)
        super().__init__(f"{self.span}: {message}")
        self.message = message


def parse_signature(text: str) -> MethodSignature:
    m = SIGNATURE_RE.match(text)
    if not m:
        raise ModelError(f"malformed method signature {text!r}; expected name(Type):Type")
    return MethodSignature(*m.groups())


class _Loader:
    def __init__(self, text: str):
        self.text = text

    def fail(self, message: str, value: Any = None, key: Optional[str] = None, obj: Any = None) -> LoadError:
        if key is not None:
            return LoadError(message, key_span(self.text, obj, key))
        return LoadError(message, span_of(self.text, value))

    def obj(self, value, what: str, required: tuple[str, ...], optional: tuple[str, ...]) -> dict:
        if not isinstance(value, dict):
            raise self.fail(f"{what} must be an object", value)
        for k in value:
            if k not in required and k not in optional:
                raise self.fail(f"unknown field {k!r} in {what}", key=k, obj=value)
        for k in required:
            if k not in value:
                raise self.fail(f"missing required field {k!r} in {what}", value)
        return value

    def string(self, value, what: str) -> str:
        if not isinstance(value, str):
            raise self.fail(f"{what} must be a string", value)
        return str(value)

    def array(self, value, what: str) -> list:
        if not isinstance(value, list):
            raise self.fail(f"{what} must be an array", value)
        return value

    def enum(self, value, table: dict, what: str):
        token = self.string(value, what)
        if token not in table:
            raise self.fail(f"bad {what} {token!r}; expected one of {', '.join(table)}", value)
        return table[token]

    def build(self, ctor, value, *args, **kwargs):
        try:
            return ctor(*args, **kwargs)
        except ModelError as exc:
            raise LoadError(str(exc), exc.span or span_of(self.text, value)) from None

    # ------------------------------------------------------------------

    def document(self, doc) -> Architecture:
        doc = self.obj(doc, "document", ("root",), ("types",))
        lattice = self.lattice(doc.get("types", []))
        root = self.component(doc["root"])
        return self.build(Architecture, doc, root, lattice)

    def lattice(self, value) -> TypeLattice:
        names: list[str] = []
        edges: list[tuple[str, str]] = []
        for entry in self.array(value, "types"):
            if isinstance(entry, str):
                name, supers = entry, []
            else:
                entry = self.obj(entry, "type declaration", ("name",), ("extends",))
                name = self.string(entry["name"], "type name")
                supers = [self.string(s, "supertype name") for s in self.array(entry.get("extends", []), "extends")]
            if name in names or name == "void":
                raise self.fail(f"duplicate type declaration {name!r}", entry)
            names.append(name)
            edges += [(name, s) for s in supers]
        return self.build(TypeLattice, value, tuple(names), tuple(edges))

    def signatures(self, value, what: str) -> tuple[MethodSignature, ...]:
        out = []
        for s in self.array(value, what):
            out.append(self.build(parse_signature, s, self.string(s, "method signature")))
        return tuple(out)

    def interface(self, value, role: Role) -> Interface:
        d = self.obj(value, "interface", ("name", "nature"), ("role", "cardinality", "signatures"))
        if "role" in d and self.enum(d["role"], ROLES, "role") is not role:
            raise self.fail(f"interface listed among {role.value}s declares role {d['role']!r}", d["role"])
        return self.build(
            Interface,
            d,
            self.string(d["name"], "interface name"),
            role,
            self.enum(d["nature"], NATURES, "nature"),
            self.enum(d.get("cardinality", "singleton"), CARDINALITIES, "cardinality"),
            self.signatures(d.get("signatures", []), "signatures"),
            span=span_of(self.text, d),
        )

    def itfs(self, d: dict, key: str, role: Role) -> tuple[Interface, ...]:
        return tuple(self.interface(v, role) for v in self.array(d.get(key, []), key))

    def binding(self, value) -> Binding:
        d = self.obj(value, "binding", ("src", "dst"), ())
        ends = []
        for k in ("src", "dst"):
            token = self.string(d[k], f"binding {k}")
            ends.append(self.build(QName.parse, d[k], token))
        return Binding(*ends, span=span_of(self.text, d))

    def scope_parts(self, d: dict):
        comps = tuple(self.component(c) for c in self.array(d.get("components", []), "components"))
        binds = tuple(self.binding(b) for b in self.array(d.get("bindings", []), "bindings"))
        return comps, binds

    def membrane(self, value) -> Membrane:
        d = self.obj(value, "membrane", (), ("components", "bindings"))
        comps, binds = self.scope_parts(d)
        return Membrane(comps, binds, span=span_of(self.text, d))

    def content(self, value) -> Content:
        d = self.obj(value, "content", (), ("server_itfs", "client_itfs", "components", "bindings"))
        servers = self.itfs(d, "server_itfs", Role.SERVER)
        clients = self.itfs(d, "client_itfs", Role.CLIENT)
        comps, binds = self.scope_parts(d)
        return self.build(Content, d, servers, clients, comps, binds, span=span_of(self.text, d))

    def component(self, value) -> Component:
        d = self.obj(
            value,
            "component",
            ("name", "kind"),
            ("server_itfs", "client_itfs", "methods", "membrane", "content"),
        )
        return self.build(
            Component,
            d,
            self.string(d["name"], "component name"),
            self.enum(d["kind"], KINDS, "kind"),
            self.itfs(d, "server_itfs", Role.SERVER),
            self.itfs(d, "client_itfs", Role.CLIENT),
            self.membrane(d.get("membrane", LocatedDict())),
            self.signatures(d.get("methods", []), "methods"),
            self.content(d["content"]) if "content" in d else None,
            span=span_of(self.text, d),
        )


def load(text: str) -> Architecture:
    """Parse a JSON architecture description; raise :class:`LoadError` on bad input."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = SpanDecoder().decode(text)
    except json.JSONDecodeError as exc:
        raise LoadError(f"malformed document: {exc.msg}", span_at(text, exc.pos)) from None
    return _Loader(text).document(doc)


def _itf_json(itf: Interface) -> dict:
    out = {"name": itf.name, "nature": itf.nature.value}
    if itf.cardinality is not Cardinality.SINGLETON:
        out["cardinality"] = itf.cardinality.value
    if itf.signatures:
        out["signatures"] = [str(s) for s in itf.signatures]
    return out


def _component_json(comp: Component) -> dict:
    out: dict = {"name": comp.name, "kind": comp.kind.value}
    if comp.server_itfs:
        out["server_itfs"] = [_itf_json(i) for i in comp.server_itfs]
    if comp.client_itfs:
        out["client_itfs"] = [_itf_json(i) for i in comp.client_itfs]
    if comp.methods:
        out["methods"] = [str(m) for m in comp.methods]
    m = comp.membrane
    if m.components or m.bindings:
        out["membrane"] = {
            "components": [_component_json(c) for c in m.components],
            "bindings": [{"src": str(b.src), "dst": str(b.dst)} for b in m.bindings],
        }
    if comp.content is not None:
        c = comp.content
        out["content"] = {
            "server_itfs": [_itf_json(i) for i in c.internal_server_itfs],
            "client_itfs": [_itf_json(i) for i in c.internal_client_itfs],
            "components": [_component_json(s) for s in c.components],
            "bindings": [{"src": str(b.src), "dst": str(b.dst)} for b in c.bindings],
        }
    return out


def to_document(arch: Architecture) -> dict:
    """Inverse of :func:`load`, as a JSON-ready dict."""
    supers: dict[str, list[str]] = {t: [] for t in arch.lattice.types}
    for sub, sup in arch.lattice.subtype_edges:
        supers[sub].append(sup)
    types = [{"name": t, "extends": s} if s else t for t, s in supers.items()]
    return {"types": types, "root": _component_json(arch.root)}


def dumps(arch: Architecture) -> str:
    return json.dumps(to_document(arch), indent=2) + "\n"
