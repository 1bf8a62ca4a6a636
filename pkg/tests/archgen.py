"""Seeded random architectures for oracle and property tests.

Two generators live here:

* ``random_membrane`` builds a single component whose membrane holds up to six
  sub-components wired so that interceptor candidates, planted pipelines,
  branches and cycles all occur often.
* ``ArchGen`` builds nested JSON documents (depth <= 4, <= 30 components) that
  are well-formed by construction unless a noise mutation is applied.
"""

from __future__ import annotations

import copy
import json
import random
from dataclasses import dataclass, field

from gcmcheck.io import load
from gcmcheck.model import (
    Architecture,
    Binding,
    Cardinality,
    Component,
    Content,
    Interface,
    Kind,
    Membrane,
    Nature,
    QName,
    Role,
    TypeLattice,
)

F, NF = Nature.F, Nature.NF
CLIENT, SERVER = Role.CLIENT, Role.SERVER


# --- single membranes -----------------------------------------------------


def _itf(name, role, nature=F, card=Cardinality.SINGLETON):
    return Interface(name, role, nature, card)


def _count(rng, weights):
    return rng.choices(range(len(weights)), weights)[0]


def _membrane_sub(rng, name):
    servers = [_itf(f"i{k}", SERVER) for k in range(_count(rng, (2, 7, 1)))]
    clients = [_itf(f"o{k}", CLIENT) for k in range(_count(rng, (2, 7, 1)))]
    if clients and rng.random() < 0.08:
        clients[0] = _itf(clients[0].name, CLIENT, F, Cardinality.MULTICAST)
    if rng.random() < 0.3:
        servers.append(_itf("ns", SERVER, NF))
    if rng.random() < 0.3:
        clients.append(_itf("nc", CLIENT, NF))
    if rng.random() < 0.1 and servers:
        servers[0] = _itf(servers[0].name, SERVER, NF)
    return Component(name, Kind.PRIMITIVE, tuple(servers), tuple(clients))


def _mirror(itfs):
    return [(i.name, i.role.flipped()) for i in itfs]


def random_membrane(rng: random.Random) -> Architecture:
    """A component ``P`` whose membrane has 0..6 sub-components."""
    composite = rng.random() < 0.6

    def ext(prefix, role):
        return [
            _itf(f"{prefix}{k}", role, F if rng.random() < 0.85 else NF) for k in range(_count(rng, (1, 4, 2)))
        ]

    ext_servers, ext_clients = ext("s", SERVER), ext("c", CLIENT)
    content = None
    if composite:
        content = Content(
            tuple(_itf(f"is{k}", SERVER) for k in range(_count(rng, (1, 3, 1)))),
            tuple(_itf(f"ic{k}", CLIENT) for k in range(_count(rng, (1, 3, 1)))),
        )
        side = _mirror(ext_servers + ext_clients) + _mirror(content.itfs)
    else:
        side = _mirror(ext_servers + ext_clients) + [(i.name, i.role) for i in ext_servers + ext_clients]

    subs = [_membrane_sub(rng, f"m{k}") for k in range(rng.randint(0, 6))]
    this_clients = [QName("This", n) for n, r in side if r is CLIENT]
    this_servers = [QName("This", n) for n, r in side if r is SERVER]
    sub_clients = [QName(c.name, i.name) for c in subs for i in c.client_itfs]
    sub_servers = [QName(c.name, i.name) for c in subs for i in c.server_itfs]

    def f_one(comp, role):
        found = [i for i in comp.itfs if i.role is role and i.nature is F]
        return found[0] if len(found) == 1 else None

    candidates = [c for c in subs if f_one(c, SERVER) and f_one(c, CLIENT)]
    bindings = []
    for _ in range(rng.choice((0, 1, 1, 2))):
        if not candidates or not this_clients or not this_servers:
            break
        run = rng.sample(candidates, rng.randint(1, len(candidates)))
        bindings.append(Binding(rng.choice(this_clients), QName(run[0].name, f_one(run[0], SERVER).name)))
        for a, b in zip(run, run[1:]):
            bindings.append(Binding(QName(a.name, f_one(a, CLIENT).name), QName(b.name, f_one(b, SERVER).name)))
        bindings.append(Binding(QName(run[-1].name, f_one(run[-1], CLIENT).name), rng.choice(this_servers)))
    srcs, dsts = this_clients + sub_clients, this_servers + sub_servers
    for _ in range(rng.randint(0, 4)):
        if srcs and dsts:
            bindings.append(Binding(rng.choice(srcs), rng.choice(dsts)))
    if bindings and rng.random() < 0.2:
        bindings.pop(rng.randrange(len(bindings)))
    rng.shuffle(bindings)

    kind = Kind.COMPOSITE if composite else Kind.PRIMITIVE
    root = Component(
        "P", kind, tuple(ext_servers), tuple(ext_clients), Membrane(tuple(subs), tuple(bindings)), content=content
    )
    return Architecture(root, TypeLattice())


# --- nested documents -----------------------------------------------------

TYPES = ["Job", "Result", "Plan"]
SIG = {"F": ["call(Job):Result"], "NF": ["ctl(Plan):void"]}


def _d_itf(name, nature, card="singleton"):
    return {"name": name, "nature": nature, "cardinality": card, "signatures": list(SIG[nature])}


@dataclass
class Generated:
    doc: dict
    interceptors: set[str] = field(default_factory=set)
    mutation: str | None = None

    def load(self) -> Architecture:
        return load(json.dumps(self.doc))


class ArchGen:
    """Nested architectures that are well-formed unless ``noise`` strikes."""

    def __init__(self, rng: random.Random, max_depth: int = 4, max_components: int = 30, noise: float = 0.3):
        self.rng = rng
        self.max_depth = max_depth
        self.max_components = max_components
        self.noise = noise

    def generate(self) -> Generated:
        self.budget = self.max_components - 1
        self.interceptors: set[str] = set()
        doc = {"types": list(TYPES), "root": self.component("Root", "/Root", 1)}
        out = Generated(doc, self.interceptors)
        if self.rng.random() < self.noise:
            out.mutation = self.mutate(doc)
        return out

    def take(self, n: int) -> int:
        n = min(n, self.budget)
        self.budget -= n
        return n

    def component(self, name: str, path: str, depth: int) -> dict:
        rng = self.rng
        composite = depth < self.max_depth and self.budget >= 2 and rng.random() < 0.5
        servers = [_d_itf(f"s{k}", "F") for k in range(rng.randint(0, 2))]
        clients = [_d_itf(f"c{k}", "F", "multicast" if rng.random() < 0.2 else "singleton") for k in range(rng.randint(0, 2))]
        if rng.random() < 0.4:
            servers.append(_d_itf("n0", "NF"))
        if rng.random() < 0.3:
            clients.append(_d_itf("r0", "NF"))
        comp = {"name": name, "kind": "composite" if composite else "primitive", "server_itfs": servers, "client_itfs": clients}
        if composite:
            comp["content"] = self.content(comp, path, depth)
        else:
            comp["methods"] = sorted({s for i in servers for s in i["signatures"]})
        if depth < self.max_depth and self.budget >= 1 and rng.random() < 0.6:
            comp["membrane"] = self.membrane(comp, path, depth)
        return comp

    def bind_all(self, sources, targets, rate: float) -> list[dict]:
        """Bind each source at most once (multicast sources up to three times)."""
        out = []
        for src, nature, card in sources:
            pool = [t for t, n in targets if n == nature]
            if not pool or self.rng.random() > rate:
                continue
            k = self.rng.randint(1, min(3, len(pool))) if card == "multicast" else 1
            out += [{"src": src, "dst": dst} for dst in self.rng.sample(pool, k)]
        return out

    def content(self, comp: dict, path: str, depth: int) -> dict:
        cpath = f"{path}/content"
        internal_clients = [_d_itf(i["name"], "F") for i in comp["server_itfs"] if i["nature"] == "F"]
        internal_servers = [_d_itf(i["name"], "F") for i in comp["client_itfs"] if i["nature"] == "F"]
        subs = [self.component(f"k{j}", f"{cpath}/k{j}", depth + 1) for j in range(self.take(self.rng.randint(0, 3)))]
        sources = [(f"This.{i['name']}", "F", "singleton") for i in internal_clients]
        targets = [(f"This.{i['name']}", "F") for i in internal_servers]
        for s in subs:
            sources += [(f"{s['name']}.{i['name']}", i["nature"], i["cardinality"]) for i in s["client_itfs"]]
            targets += [(f"{s['name']}.{i['name']}", i["nature"]) for i in s["server_itfs"]]
        bindings = self.bind_all(sources, targets, 0.8)
        self.rng.shuffle(bindings)
        return {"server_itfs": internal_servers, "client_itfs": internal_clients, "components": subs, "bindings": bindings}

    def membrane(self, comp: dict, path: str, depth: int) -> dict:
        rng = self.rng
        mpath = f"{path}/membrane"
        composite = comp["kind"] == "composite"
        subs, bindings = [], []
        f_servers = [i["name"] for i in comp["server_itfs"] if i["nature"] == "F"]
        nf_servers = [i["name"] for i in comp["server_itfs"] if i["nature"] == "NF"]
        nf_clients = [i["name"] for i in comp["client_itfs"] if i["nature"] == "NF"]
        sources, targets = [], []
        if f_servers and rng.random() < 0.6 and self.take(1):
            through = rng.choice(f_servers)
            icpt = {
                "name": "Icpt",
                "kind": "primitive",
                "server_itfs": [_d_itf("fi", "F")],
                "client_itfs": [_d_itf("fo", "F")] + ([_d_itf("nc", "NF")] if rng.random() < 0.5 else []),
            }
            subs.append(icpt)
            self.interceptors.add(f"{mpath}/Icpt")
            bindings += [{"src": f"This.{through}", "dst": "Icpt.fi"}, {"src": "Icpt.fo", "dst": f"This.{through}"}]
            sources += [("Icpt.nc", "NF", "singleton")] if len(icpt["client_itfs"]) > 1 else []
        for j in range(self.take(rng.randint(0, 2))):
            ctl = self.component(f"ctl{j}", f"{mpath}/ctl{j}", depth + 1)
            subs.append(ctl)
            sources += [(f"ctl{j}.{i['name']}", i["nature"], i["cardinality"]) for i in ctl["client_itfs"]]
            targets += [(f"ctl{j}.{i['name']}", i["nature"]) for i in ctl["server_itfs"]]
        # membrane-side non-functional interfaces: mirrors of external NF ones
        sources += [(f"This.{n}", "NF", "singleton") for n in nf_servers]
        targets += [(f"This.{n}", "NF") for n in nf_clients]
        if not composite:
            sources += [(f"This.{n}", "NF", "singleton") for n in nf_clients]
            targets += [(f"This.{n}", "NF") for n in nf_servers]
        bindings += self.bind_all(sources, targets, 0.7)
        rng.shuffle(bindings)
        return {"components": subs, "bindings": bindings}

    # noise ---------------------------------------------------------------

    def scopes(self, comp: dict):
        for key in ("membrane", "content"):
            if key in comp:
                yield comp[key]
                for sub in comp[key]["components"]:
                    yield from self.scopes(sub)

    def mutate(self, doc: dict) -> str:
        rng = self.rng
        scopes = list(self.scopes(doc["root"]))
        with_bindings = [s for s in scopes if s["bindings"]]
        with_subs = [s for s in scopes if len(s["components"]) >= 2]
        options = ["nature"]
        if with_bindings:
            options += ["dup_binding", "flip_binding", "dangling"]
        if with_subs:
            options.append("dup_name")
        kind = rng.choice(options)
        if kind == "dup_binding":
            s = rng.choice(with_bindings)
            s["bindings"].append(copy.deepcopy(rng.choice(s["bindings"])))
        elif kind == "flip_binding":
            b = rng.choice(rng.choice(with_bindings)["bindings"])
            b["src"], b["dst"] = b["dst"], b["src"]
        elif kind == "dangling":
            b = rng.choice(rng.choice(with_bindings)["bindings"])
            b["dst"] = b["dst"].split(".")[0] + ".zz"
        elif kind == "dup_name":
            s = rng.choice(with_subs)
            s["components"][1]["name"] = s["components"][0]["name"]
        else:
            comps = [doc["root"]] + [c for s in scopes for c in s["components"]]
            itfs = [i for c in comps for i in c["server_itfs"] + c["client_itfs"]]
            if itfs:
                i = rng.choice(itfs)
                i["nature"] = "NF" if i["nature"] == "F" else "F"
        return kind
