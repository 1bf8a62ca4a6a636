"""Deployable XML (ADL) export and its reader.

Export is gated on a well-formed report.  The reader exists so exported
files can be loaded back and re-checked.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
import xml.parsers.expat
from typing import Optional

from ..check import DiagnosticReport, check
from ..model import (
    Architecture,
    Binding,
    Cardinality,
    Component,
    Content,
    Interface,
    Kind,
    Membrane,
    ModelError,
    Nature,
    QName,
    Role,
    SourceSpan,
    TypeLattice,
)
from .load import CARDINALITIES, KINDS, ROLES, LoadError, parse_signature

ADL_VERSION = "1.0"
NATURE_NAMES = {Nature.F: "functional", Nature.NF: "non-functional"}
NATURE_TOKENS = {v: k for k, v in NATURE_NAMES.items()}


class RefusedExport(Exception):
    """Export refused because the architecture is not well-formed."""

    def __init__(self, codes: list[str]):
        self.codes = codes
        super().__init__(f"architecture is not well-formed: {', '.join(codes)}")


def _interface_el(itf: Interface) -> ET.Element:
    el = ET.Element("interface")
    el.set("name", itf.name)
    el.set("role", itf.role.value)
    el.set("nature", NATURE_NAMES[itf.nature])
    el.set("cardinality", itf.cardinality.value)
    if itf.signatures:
        el.set("signature", ";".join(str(s) for s in itf.signatures))
    return el


def _binding_el(b: Binding) -> ET.Element:
    return ET.Element("binding", {"client": str(b.src), "server": str(b.dst)})


def _component_el(comp: Component) -> ET.Element:
    el = ET.Element("component", {"name": comp.name, "kind": comp.kind.value})
    el.extend(_interface_el(i) for i in comp.itfs)
    el.extend(ET.Element("method", {"signature": str(m)}) for m in comp.methods)
    m = comp.membrane
    if m.components or m.bindings:
        ctl = ET.SubElement(el, "controller")
        ctl.extend(_component_el(c) for c in m.components)
        ctl.extend(_binding_el(b) for b in m.bindings)
    c = comp.content
    if c is not None and (c.itfs or c.components or c.bindings):
        cont = ET.SubElement(el, "content")
        cont.extend(_interface_el(i) for i in c.itfs)
        cont.extend(_component_el(s) for s in c.components)
        cont.extend(_binding_el(b) for b in c.bindings)
    return el


def export_adl(arch: Architecture, report: Optional[DiagnosticReport] = None) -> str:
    """Serialize a well-formed architecture; raise :class:`RefusedExport` otherwise."""
    if report is None:
        report = check(arch)
    if not report.well_formed:
        raise RefusedExport(sorted(set(report.codes)))
    root = ET.Element("definition", {"adl-version": ADL_VERSION})
    types = ET.SubElement(root, "types")
    supers: dict[str, list[str]] = {t: [] for t in arch.lattice.types}
    for sub, sup in arch.lattice.subtype_edges:
        supers[sub].append(sup)
    for name, sups in supers.items():
        t = ET.SubElement(types, "type", {"name": name})
        if sups:
            t.set("extends", " ".join(sups))
    root.append(_component_el(arch.root))
    ET.indent(root, space="  ")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


# --------------------------------------------------------------------------
# reading

def _parse(text: str) -> tuple[ET.Element, dict[int, SourceSpan]]:
    builder = ET.TreeBuilder()
    spans: dict[int, SourceSpan] = {}
    parser = xml.parsers.expat.ParserCreate()

    def start(tag, attrs):
        el = builder.start(tag, attrs)
        spans[id(el)] = SourceSpan(parser.CurrentLineNumber, parser.CurrentColumnNumber + 1, len(tag) + 1)

    parser.StartElementHandler = start
    parser.EndElementHandler = builder.end
    try:
        parser.Parse(text, True)
    except xml.parsers.expat.ExpatError as exc:
        raise LoadError(f"malformed XML: {xml.parsers.expat.errors.messages[exc.code]}",
                        SourceSpan(exc.lineno, exc.offset + 1)) from None
    return builder.close(), spans


class _AdlReader:
    def __init__(self, spans: dict[int, SourceSpan]):
        self.spans = spans

    def fail(self, message: str, el: ET.Element) -> LoadError:
        return LoadError(message, self.spans.get(id(el)))

    def attrs(self, el: ET.Element, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict:
        for k in el.attrib:
            if k not in required and k not in optional:
                raise self.fail(f"unknown attribute {k!r} on <{el.tag}>", el)
        for k in required:
            if k not in el.attrib:
                raise self.fail(f"missing attribute {k!r} on <{el.tag}>", el)
        return el.attrib

    def token(self, el: ET.Element, key: str, table: dict):
        value = el.get(key)
        if value not in table:
            raise self.fail(f"bad {key} {value!r} on <{el.tag}>", el)
        return table[value]

    def build(self, ctor, el, *args, **kwargs):
        try:
            return ctor(*args, **kwargs)
        except ModelError as exc:
            raise LoadError(str(exc), exc.span or self.spans.get(id(el))) from None

    def expect(self, el: ET.Element, tags: tuple[str, ...]) -> None:
        for child in el:
            if child.tag not in tags:
                raise self.fail(f"unexpected <{child.tag}> inside <{el.tag}>", child)

    def definition(self, root: ET.Element) -> Architecture:
        if root.tag != "definition":
            raise self.fail(f"root element must be <definition>, not <{root.tag}>", root)
        self.attrs(root, ("adl-version",))
        self.expect(root, ("types", "component"))
        comps = root.findall("component")
        if len(comps) != 1:
            raise self.fail("<definition> must contain exactly one <component>", root)
        types_el = root.find("types")
        lattice = self.lattice(types_el) if types_el is not None else TypeLattice()
        return self.build(Architecture, root, self.component(comps[0]), lattice)

    def lattice(self, el: ET.Element) -> TypeLattice:
        self.expect(el, ("type",))
        names, edges = [], []
        for t in el:
            a = self.attrs(t, ("name",), ("extends",))
            names.append(a["name"])
            edges += [(a["name"], s) for s in a.get("extends", "").split()]
        return self.build(TypeLattice, el, tuple(names), tuple(edges))

    def interface(self, el: ET.Element) -> Interface:
        a = self.attrs(el, ("name", "role", "nature"), ("cardinality", "signature"))
        sigs = tuple(
            self.build(parse_signature, el, s) for s in a.get("signature", "").split(";") if s.strip()
        )
        return self.build(
            Interface,
            el,
            a["name"],
            self.token(el, "role", ROLES),
            self.token(el, "nature", NATURE_TOKENS),
            self.token(el, "cardinality", CARDINALITIES) if "cardinality" in a else Cardinality.SINGLETON,
            sigs,
            span=self.spans.get(id(el)),
        )

    def binding(self, el: ET.Element) -> Binding:
        a = self.attrs(el, ("client", "server"))
        return Binding(
            self.build(QName.parse, el, a["client"]),
            self.build(QName.parse, el, a["server"]),
            span=self.spans.get(id(el)),
        )

    def split_itfs(self, el: ET.Element) -> tuple[tuple[Interface, ...], tuple[Interface, ...]]:
        itfs = [self.interface(i) for i in el.findall("interface")]
        return (
            tuple(i for i in itfs if i.role is Role.SERVER),
            tuple(i for i in itfs if i.role is Role.CLIENT),
        )

    def component(self, el: ET.Element) -> Component:
        a = self.attrs(el, ("name", "kind"))
        self.expect(el, ("interface", "method", "controller", "content"))
        kind = self.token(el, "kind", KINDS)
        servers, clients = self.split_itfs(el)
        methods = tuple(
            self.build(parse_signature, m, self.attrs(m, ("signature",))["signature"]) for m in el.findall("method")
        )
        ctl = el.find("controller")
        membrane = Membrane()
        if ctl is not None:
            self.expect(ctl, ("component", "binding"))
            membrane = Membrane(
                tuple(self.component(c) for c in ctl.findall("component")),
                tuple(self.binding(b) for b in ctl.findall("binding")),
                span=self.spans.get(id(ctl)),
            )
        content = None
        cont = el.find("content")
        if cont is not None:
            self.expect(cont, ("interface", "component", "binding"))
            cs, cc = self.split_itfs(cont)
            content = self.build(
                Content,
                cont,
                cs,
                cc,
                tuple(self.component(c) for c in cont.findall("component")),
                tuple(self.binding(b) for b in cont.findall("binding")),
                span=self.spans.get(id(cont)),
            )
        elif kind is Kind.COMPOSITE:
            content = Content()
        return self.build(
            Component, el, a["name"], kind, servers, clients, membrane, methods, content,
            span=self.spans.get(id(el)),
        )


def load_adl(text: str) -> Architecture:
    """Read an exported ADL document back into an :class:`Architecture`."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    root, spans = _parse(text)
    return _AdlReader(spans).definition(root)
