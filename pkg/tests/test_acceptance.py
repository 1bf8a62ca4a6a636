"""Acceptance gate: six criteria, each reported as one PASS/FAIL line in the
terminal summary."""

import collections
import itertools
import random
import time

from archgen import ArchGen, random_membrane
from corpus import GOLDEN, MUTATIONS, from_doc, golden_doc, mutated
from gcmcheck.check import card_validity, check
from gcmcheck.interceptors import find_chains, interceptors
from gcmcheck.io import RefusedExport, export_adl, load, load_adl, to_document
from gcmcheck.model import Cardinality, Content, Membrane
from gcmcheck.resolve import ItfRef, ResolutionError, control_level, itf_refs, resolve_binding
from oracles import (
    brute_force_chains,
    component_stats,
    determinism_failures,
    encapsulation_failures,
    naming_failures,
    separation_failures,
)


def test_golden_fixture(verdict):
    start = time.perf_counter()
    arch = load(GOLDEN.read_text(encoding="utf-8"))
    report = check(arch)
    xml = export_adl(arch, report)
    again = load_adl(xml)
    again_report = check(again)
    elapsed = time.perf_counter() - start

    app = arch.root
    shape_ok = (
        [c.name for c in app.content.components] == ["Front-end", "W1", "W2", "Repository"]
        and {c.name for c in app.membrane.components} >= {"Collector", "Analyser", "Planner", "Executor", "In_Monitor"}
        and all(c.membrane.components[0].name == "Monitor" for c in app.content.components[1:3])
        and arch.element_at("/Application/content/Front-end/itf:M1:client").cardinality is Cardinality.MULTICAST
        and arch.element_at("/Application/content/Repository/itf:G1:server").cardinality is Cardinality.GATHERCAST
    )
    isomorphic = again == arch and to_document(again) == to_document(arch)
    ok = shape_ok and report.violations == [] and isomorphic and again_report.well_formed and elapsed < 1.0
    verdict(1, ok, f"golden fixture: {len(report.violations)} violations, round-trip={isomorphic}, {elapsed:.3f}s")
    assert shape_ok
    assert report.violations == []
    assert isomorphic and again_report.well_formed
    assert elapsed < 1.0


def test_mutation_suite(verdict):
    missing = []
    for code, _ in sorted(MUTATIONS.items()):
        codes = check(from_doc(mutated(code))).codes
        if code not in codes:
            missing.append((code, codes))
    scenario = check(from_doc(mutated("E_BIND_TYPE"))).codes
    ok = not missing and scenario == ["E_BIND_TYPE"]
    verdict(2, ok, f"mutation suite: {len(MUTATIONS) - len(missing)}/{len(MUTATIONS)} codes, incompatible binding -> {scenario}")
    assert not missing
    assert scenario == ["E_BIND_TYPE"]


def test_interceptor_oracle_equivalence(verdict):
    rng = random.Random(2024)
    start = time.perf_counter()
    mismatches, sequences, chains = [], 0, 0
    sizes = collections.Counter()
    for n in range(500):
        arch = random_membrane(rng)
        mpath = arch.root_path / "membrane"
        k = len(arch.element_at(mpath).components)
        sizes[k] += 1
        sequences += sum(len(list(itertools.permutations(range(k), r))) for r in range(1, k + 1))
        found = {c.members: c.direction for c in find_chains(mpath, arch)}
        chains += len(found)
        if found != brute_force_chains(arch, mpath):
            mismatches.append(n)
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 30 and max(sizes) <= 6
    verdict(3, ok, f"oracle equivalence: 500 membranes, {sequences} sequences, {chains} chains, {len(mismatches)} mismatches, {elapsed:.1f}s")
    assert max(sizes) <= 6 and sizes[6] > 0
    assert mismatches == []
    assert elapsed < 30


def _resolution_inside_scope(arch):
    for path, elem in arch.walk():
        if not isinstance(elem, (Membrane, Content)):
            continue
        allowed = set(itf_refs(path, arch))
        for sub in elem.components:
            allowed |= set(itf_refs(path / sub.name, arch))
        for idx in range(len(elem.bindings)):
            for end in resolve_binding(path, idx, arch):
                if not isinstance(end, ItfRef) or end not in allowed:
                    return False
    return True


def _levels_separated(arch):
    for path, elem in arch.walk():
        if isinstance(elem, (Membrane, Content)):
            for idx in range(len(elem.bindings)):
                a, d = (control_level(e, arch) for e in resolve_binding(path, idx, arch))
                if (a == 1) != (d == 1):
                    return False
    return True


def test_architectural_properties(verdict):
    gen = ArchGen(random.Random(77), max_depth=4, max_components=30, noise=0.3)
    checked, generated = 0, 0
    failures = collections.defaultdict(list)
    while checked < 220 and generated < 2000:
        g = gen.generate()
        generated += 1
        count, depth = component_stats(g.doc)
        if count > 30 or depth > 4:
            failures["bounds"].append(generated)
        arch = g.load()
        if not check(arch).well_formed:
            continue
        checked += 1
        found = {
            str(p)
            for path, e in arch.walk()
            if isinstance(e, Membrane)
            for p in interceptors(path, arch)
        }
        if g.mutation is None and found != g.interceptors:
            failures["interceptor truth"].append(generated)
        if encapsulation_failures(g.doc) or not _resolution_inside_scope(arch):
            failures["a encapsulation"].append(generated)
        if determinism_failures(g.doc):
            failures["b deterministic"].append(generated)
        if naming_failures(g.doc):
            failures["c naming"].append(generated)
        if separation_failures(g.doc, found) or not _levels_separated(arch):
            failures["d separation"].append(generated)
    ok = checked >= 200 and not failures
    verdict(4, ok, f"properties (a)-(d): {checked} well-formed of {generated} generated, failures={dict(failures) or 'none'}")
    assert checked >= 200
    assert not failures


def test_export_gate(verdict):
    docs = [golden_doc()] + [mutated(code) for code in sorted(MUTATIONS)]
    gen = ArchGen(random.Random(5), noise=0.5)
    docs += [gen.generate().doc for _ in range(60)]
    mismatches, unstable, exported = [], [], 0
    for n, doc in enumerate(docs):
        arch = from_doc(doc)
        well_formed = check(arch).well_formed
        try:
            first = export_adl(arch)
        except RefusedExport:
            if well_formed:
                mismatches.append(n)
            continue
        exported += 1
        if not well_formed:
            mismatches.append(n)
        if export_adl(from_doc(doc)) != first or export_adl(arch) != first:
            unstable.append(n)
    ok = not mismatches and not unstable and 0 < exported < len(docs)
    verdict(5, ok, f"export gate: {len(docs)} documents, {exported} exported, {len(mismatches)} gate mismatches, {len(unstable)} unstable")
    assert mismatches == []
    assert unstable == []
    assert 0 < exported < len(docs)


def _revised_card_count(arch, path, multicast_mode):
    """Pairs of bindings sharing a source, excused only for multicast sources."""
    scope = arch.element_at(path)
    by_src = collections.defaultdict(int)
    for idx in range(len(scope.bindings)):
        src, dst = resolve_binding(path, idx, arch)
        if not isinstance(src, ResolutionError) and not isinstance(dst, ResolutionError):
            by_src[src] += 1
    return sum(
        n * (n - 1) // 2
        for src, n in by_src.items()
        if not (multicast_mode and src.itf.cardinality is Cardinality.MULTICAST)
    )


def test_cardinality_table_conformance(verdict):
    arch = from_doc(golden_doc())
    strict = card_validity("/Application/content", arch, multicast_mode=False)
    strict_ok = [(v.code, str(v.path), str(v.related)) for v in strict] == [
        ("E_BIND_CARD", "/Application/content/binding:2", "/Application/content/binding:1")
    ] and arch.root.content.bindings[1].src == arch.root.content.bindings[2].src
    relaxed_ok = card_validity("/Application/content", arch, multicast_mode=True) == []
    whole_ok = check(arch, multicast_mode=True).well_formed and check(arch, multicast_mode=False).codes == ["E_BIND_CARD"]

    gen = ArchGen(random.Random(6), noise=0.5)
    disagreements = 0
    for _ in range(80):
        a = gen.generate().load()
        for path, elem in a.walk():
            if isinstance(elem, (Membrane, Content)):
                for mode in (True, False):
                    if len(card_validity(path, a, multicast_mode=mode)) != _revised_card_count(a, path, mode):
                        disagreements += 1
    ok = strict_ok and relaxed_ok and whole_ok and disagreements == 0
    verdict(6, ok, f"cardinality spot checks: strict rejects M1={strict_ok}, multicast accepts M1={relaxed_ok}, {disagreements} predicate disagreements")
    assert strict_ok and relaxed_ok and whole_ok
    assert disagreements == 0
