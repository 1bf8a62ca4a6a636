"""Graphviz rendering of an architecture, including ill-formed ones."""

from __future__ import annotations

import itertools

from ..model import MEMBRANE, Architecture, Component, Interface, Nature, Path, component_segments, itf_segment
from ..resolve import ItfRef, ResolutionError, resolve_binding

COLORS = {Nature.F: "blue", Nature.NF: "green"}
MISSING = "missing"


class _DotWriter:
    def __init__(self, arch: Architecture):
        self.arch = arch
        self.lines: list[str] = []
        self.edges: list[str] = []
        self.clusters = itertools.count()
        self.missing = False

    def out(self, depth: int, text: str) -> None:
        self.lines.append("  " * depth + text)

    def itf_node(self, depth: int, path: Path, itf: Interface) -> None:
        self.out(
            depth,
            f'"{path}" [label="{itf.name}", shape=ellipse, color={COLORS[itf.nature]}, '
            f'tooltip="{itf.role.value} {itf.nature.value} {itf.cardinality.value}"];',
        )

    def open_cluster(self, depth: int, label: str, extra: str = "") -> None:
        self.out(depth, f"subgraph cluster_{next(self.clusters)} {{")
        self.out(depth + 1, f'label="{label}";{extra}')

    def component(self, depth: int, path: Path, comp: Component) -> None:
        m = comp.membrane
        clustered = comp.is_composite or bool(m.components or m.bindings)
        if clustered:
            self.open_cluster(depth, comp.name)
            depth += 1
        self.out(depth, f'"{path}" [label="{comp.name}", shape={"box3d" if comp.is_composite else "box"}];')
        for itf in comp.itfs:
            self.itf_node(depth, path / itf_segment(itf.name, itf.role), itf)
        if clustered:
            mpath = path / MEMBRANE
            self.open_cluster(depth, "membrane", " style=filled; fillcolor=lightgrey;")
            for seg, sub in zip(component_segments(m.components), m.components):
                self.component(depth + 1, mpath / seg, sub)
            self.out(depth, "}")
            self.scope_edges(mpath, len(m.bindings))
            if comp.is_composite:
                cpath = path / "content"
                self.open_cluster(depth, "content", " style=solid;")
                for itf in comp.content.itfs:
                    self.itf_node(depth + 1, cpath / itf_segment(itf.name, itf.role), itf)
                subs = comp.content.components
                for seg, sub in zip(component_segments(subs), subs):
                    self.component(depth + 1, cpath / seg, sub)
                self.out(depth, "}")
                self.scope_edges(cpath, len(comp.content.bindings))
            self.out(depth - 1, "}")

    def endpoint(self, end) -> str:
        if isinstance(end, ResolutionError):
            self.missing = True
            return MISSING
        return str(end.origin or end.path)

    def scope_edges(self, spath: Path, count: int) -> None:
        for idx in range(count):
            src, dst = resolve_binding(spath, idx, self.arch)
            known = next((e for e in (src, dst) if isinstance(e, ItfRef)), None)
            nature = known.itf.nature if known else Nature.F
            style = "dashed" if nature is Nature.NF else "solid"
            self.edges.append(
                f'  "{self.endpoint(src)}" -> "{self.endpoint(dst)}" '
                f'[color={COLORS[nature]}, style={style}, tooltip="{spath}/binding:{idx}"];'
            )

    def render(self) -> str:
        self.lines = ["digraph architecture {", "  compound=true;", '  node [fontname="Helvetica"];']
        self.component(1, self.arch.root_path, self.arch.root)
        if self.missing:
            self.out(1, f'"{MISSING}" [label="{MISSING}", shape=plaintext, fontcolor=red];')
        return "\n".join(self.lines + self.edges + ["}"]) + "\n"


def export_dot(arch: Architecture) -> str:
    """Clustered digraph: composites as clusters with membrane and content sub-clusters."""
    return _DotWriter(arch).render()
