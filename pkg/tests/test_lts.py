"""Components, constraints, products, and the class machinery."""

import random

import pytest

from conftest import (TEST_CAPS, component, cycles_spec, synced_spec,
                      two_by_two_spec)
from syncmc.errors import ResourceLimitError, SpecError
from syncmc.lts import (EPS, LabelAlphabet, LabeledTransitionSystem,
                        ProductSpec, SyncConstraint, build_product,
                        enabled_vertices, is_finitely_synchronized,
                        load_spec, render_product_vertex, render_sync_label,
                        save_spec, sim_classes, spec_from_json, spec_to_json,
                        split_product_vertex, sync_components)
from syncmc.randgen import random_spec


def test_eps_is_reserved_as_label():
    with pytest.raises(SpecError):
        LabelAlphabet(1, frozenset({EPS}), frozenset())


def test_bad_label_identifier_rejected():
    with pytest.raises(SpecError):
        LabelAlphabet(1, frozenset({"a-b"}), frozenset())


def test_local_and_sync_must_be_disjoint():
    with pytest.raises(SpecError):
        LabelAlphabet(1, frozenset({"a"}), frozenset({"a"}))


def test_edge_set_eps_is_identity():
    g = component(1, ["p", "q"], {"a": {("p", "q")}}, local=["a"])
    assert g.edge_set(EPS) == {("p", "p"), ("q", "q")}
    assert g.edge_set("a") == {("p", "q")}


def test_all_eps_constraint_tuple_rejected():
    with pytest.raises(SpecError):
        SyncConstraint(frozenset({(EPS, EPS)}))


def test_constraint_arity_must_match_components():
    c1 = component(1, ["p"], {}, sync=["a"])
    c2 = component(2, ["q"], {}, sync=["b"])
    with pytest.raises(SpecError):
        ProductSpec((c1, c2), SyncConstraint(frozenset({("a", "b", "a")})))


def test_constraint_entries_must_be_sync_labels():
    c1 = component(1, ["p"], {}, local=["a"])
    c2 = component(2, ["q"], {}, sync=["b"])
    with pytest.raises(SpecError):
        ProductSpec((c1, c2), SyncConstraint(frozenset({("a", "b")})))


def test_shared_local_labels_rejected():
    c1 = component(1, ["p"], {}, local=["a"])
    c2 = component(2, ["q"], {}, local=["a"])
    with pytest.raises(SpecError):
        ProductSpec((c1, c2), SyncConstraint(frozenset()))


def test_product_vertex_round_trip():
    name = render_product_vertex(("p", "(x,y)", "q"))
    assert split_product_vertex(name, 3) == ("p", "(x,y)", "q")
    with pytest.raises(SpecError):
        split_product_vertex(name, 2)


def test_two_by_two_grid_product():
    spec = two_by_two_spec()
    product = build_product(spec, TEST_CAPS)
    assert len(product.vertices) == 4
    # one a-edge per q-row, one b-edge per p-column
    assert product.edge_set("a") == {("(p,q)", "(pp,q)"),
                                     ("(p,qq)", "(pp,qq)")}
    assert product.edge_set("b") == {("(p,q)", "(p,qq)"),
                                     ("(pp,q)", "(pp,qq)")}


def test_cycles_product_counts():
    product = build_product(cycles_spec(), TEST_CAPS)
    assert len(product.vertices) == 6
    assert len(product.edge_set("a")) + len(product.edge_set("b")) == 12


def test_local_edge_count_formula():
    rng = random.Random(11)
    for _ in range(20):
        spec = random_spec(rng)
        try:
            product = build_product(spec, TEST_CAPS)
        except ResourceLimitError:
            continue
        sizes = [len(g.vertices) for g in spec.components]
        for i, g in enumerate(spec.components):
            others = 1
            for j, s in enumerate(sizes):
                if j != i:
                    others *= s
            for lab in g.alphabet.local:
                assert len(product.edge_set(lab)) == \
                    len(g.edge_set(lab)) * others


def test_sync_edge_semantics():
    spec = synced_spec()
    product = build_product(spec, TEST_CAPS)
    lab = render_sync_label(("a", "b"))
    assert product.edge_set(lab) == {("(p0,q0)", "(p1,q1)")}
    # the local loop moves only its own coordinate
    assert ("(p0,q0)", "(p0,q0)") in product.edge_set("l1")


def test_product_size_guard():
    spec = cycles_spec()
    from syncmc.errors import Caps
    with pytest.raises(ResourceLimitError) as info:
        build_product(spec, Caps(product_size=5))
    assert info.value.cap_name == "product_size"


def test_enabled_vertices_matches_filter_by_definition():
    rng = random.Random(7)
    checked = 0
    while checked < 10:
        spec = random_spec(rng)
        if not spec.constraint:
            continue
        try:
            product = build_product(spec, TEST_CAPS)
        except ResourceLimitError:
            continue
        for c in spec.constraint:
            lab = render_sync_label(c)
            expected = {u for u in product.vertices
                        if any(s == u for (s, _) in product.edge_set(lab))}
            got = enabled_vertices(spec, {c}, TEST_CAPS, product)
            assert got == expected
        checked += 1


def test_sim_classes_projection_keying():
    c1 = component(1, ["p", "pp"],
                   {"a": {("p", "p"), ("pp", "pp")}}, sync=["a"])
    c2 = component(2, ["q0", "q1", "q2"], {}, local=["l2"])
    spec = ProductSpec((c1, c2),
                       SyncConstraint(frozenset({("a", EPS)})))
    info = sim_classes(spec, {("a", EPS)}, TEST_CAPS)
    assert info.index == 2
    assert set(info.classes) == {("p",), ("pp",)}


def test_sim_classes_index_bound():
    rng = random.Random(23)
    checked = 0
    while checked < 30:
        spec = random_spec(rng)
        if len(spec.constraint) < 2:
            continue
        try:
            product = build_product(spec, TEST_CAPS)
        except ResourceLimitError:
            continue
        full = sim_classes(spec, set(spec.constraint), TEST_CAPS, product)
        bound = 1
        for c in spec.constraint:
            bound *= sim_classes(spec, {c}, TEST_CAPS, product).index
        assert full.index <= bound
        checked += 1


def test_sync_components_indices():
    assert sync_components(("a", EPS, "b")) == {1, 3}


def test_finitely_synchronized_explicit():
    report = is_finitely_synchronized(synced_spec(), TEST_CAPS)
    assert report.finitely_synchronized
    assert report.per_tuple[("a", "b")] == 1


def test_finitely_synchronized_declared_passthrough():
    from syncmc.lts import FiniteSyncReport
    declared = FiniteSyncReport(False, note="semifinite gadget")
    report = is_finitely_synchronized(synced_spec(), TEST_CAPS,
                                      declared=declared)
    assert report is declared


def test_spec_json_round_trip(tmp_path):
    spec = synced_spec()
    doc = spec_to_json(spec)
    again = spec_from_json(doc)
    assert spec_to_json(again) == doc
    path = tmp_path / "spec.json"
    save_spec(spec, path)
    assert spec_to_json(load_spec(path)) == doc


def test_empty_component_rejected():
    with pytest.raises(SpecError):
        ProductSpec((component(1, [], {}),), SyncConstraint(frozenset()))
