from collections import Counter, deque

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from depthlayer.core import ConsistencyError, LineSegment
from depthlayer.labeling import LabeledSegments, assign_layer_numbers, assign_object_numbers
from depthlayer.linking import (
    CompoundObject,
    ObjectLayer,
    build_compound_objects,
    link_object_layers,
    object_number_map,
    order_layers,
    render_label_map,
    run_layering,
)
from depthlayer.oracle import compare_partitions, oracle_object_layers
from depthlayer.segmentation import segment_all_rows
from depthlayer.synthgen import gen_random_plateaus

from conftest import depth_from_rows


def co(on, lns, depth=0, pixels=1):
    return CompoundObject(on, set(lns), pixels, Counter({depth: pixels}))


def groups(layers):
    return {(ol.object_numbers, ol.layer_numbers) for ol in layers}


def test_compound_objects_collect_layers():
    lab = LabeledSegments(
        rows=[[LineSegment(0, 0, 1, 5, 1, 1), LineSegment(0, 2, 2, 9, 2, 2)],
              [LineSegment(1, 0, 2, 9, 1, 2)]],
        threshold_used=0, width=3,
    )
    cos = build_compound_objects(lab)
    assert [(c.object_number, c.layer_numbers) for c in cos] == [(1, {1, 2}), (2, {2})]
    assert [c.pixel_count for c in cos] == [5, 1]
    assert cos[0].value_histogram == {5: 2, 9: 3}


def test_compound_objects_require_labels():
    lab = LabeledSegments(rows=[[LineSegment(0, 0, 0, 5)]], threshold_used=0, width=1)
    with pytest.raises(ConsistencyError):
        build_compound_objects(lab)


def test_single_segment_single_compound():
    lab = LabeledSegments(rows=[[LineSegment(0, 0, 3, 5, 1, 1)]], threshold_used=0, width=4)
    cos = build_compound_objects(lab)
    assert len(cos) == 1 and cos[0].layer_numbers == {1}


def test_link_shared_layer_reunites_parts():
    layers = link_object_layers([co(1, [1]), co(2, [1]), co(3, [2])])
    assert groups(layers) == {(frozenset({1, 2}), frozenset({1})), (frozenset({3}), frozenset({2}))}


def test_link_bridging_object():
    layers = link_object_layers([co(1, [1, 2]), co(2, [2]), co(3, [3])])
    assert groups(layers) == {(frozenset({1, 2}), frozenset({1, 2})), (frozenset({3}), frozenset({3}))}


def test_link_single():
    layers = link_object_layers([co(1, [1])])
    assert groups(layers) == {(frozenset({1}), frozenset({1}))}


def test_link_empty_rejected():
    with pytest.raises(ValueError):
        link_object_layers([])


def _bfs_bipartite(compounds):
    adj = {}
    for c in compounds:
        o = ("o", c.object_number)
        adj.setdefault(o, set())
        for ln in c.layer_numbers:
            adj[o].add(("l", ln))
            adj.setdefault(("l", ln), set()).add(o)
    seen, out = set(), set()
    for start in adj:
        if start in seen:
            continue
        comp, q = {start}, deque([start])
        seen.add(start)
        while q:
            for nb in adj[q.popleft()]:
                if nb not in seen:
                    seen.add(nb)
                    comp.add(nb)
                    q.append(nb)
        out.add((frozenset(i for k, i in comp if k == "o"), frozenset(i for k, i in comp if k == "l")))
    return out


incidence = st.lists(st.sets(st.integers(1, 8), min_size=1, max_size=3), min_size=1, max_size=10)


@given(incidence)
def test_link_matches_bfs_and_partitions(layer_sets):
    compounds = [co(i + 1, s) for i, s in enumerate(layer_sets)]
    layers = link_object_layers(compounds)
    assert groups(layers) == _bfs_bipartite(compounds)
    objs = [o for ol in layers for o in ol.object_numbers]
    lns = [ln for ol in layers for ln in ol.layer_numbers]
    assert sorted(objs) == list(range(1, len(compounds) + 1))
    assert len(lns) == len(set(lns)) == len(set().union(*layer_sets))


@given(incidence)
def test_link_is_idempotent(layer_sets):
    first = link_object_layers([co(i + 1, s) for i, s in enumerate(layer_sets)])
    again = link_object_layers([co(min(ol.object_numbers), ol.layer_numbers) for ol in first])
    assert {ol.layer_numbers for ol in again} == {ol.layer_numbers for ol in first}


def _ol(objs, depth):
    return ObjectLayer(0, frozenset(objs), frozenset(objs), depth, 1)


def test_order_far_low():
    ranked = order_layers([_ol({1}, 200), _ol({2}, 10)], far_is_low=True)
    assert [(ol.representative_depth, ol.depth_rank, ol.id) for ol in ranked] == [(10, 1, 1), (200, 2, 2)]


def test_order_far_high():
    ranked = order_layers([_ol({1}, 200), _ol({2}, 10)], far_is_low=False)
    assert [ol.representative_depth for ol in ranked] == [200, 10]


def test_order_single_and_ties():
    assert order_layers([_ol({4}, 3)])[0].depth_rank == 1
    ranked = order_layers([_ol({7}, 50), _ol({2}, 50)])
    assert [min(ol.object_numbers) for ol in ranked] == [2, 7]


def _pipeline(d, t=2, c=2):
    segs = segment_all_rows(d, t)
    lab = assign_layer_numbers(assign_object_numbers(segs, d, c), 0)
    layers = order_layers(link_object_layers(build_compound_objects(lab)))
    return lab, layers, render_label_map(d, lab, layers)


def test_render_u_shape(u_shape):
    _, layers, lm = _pipeline(u_shape)
    assert lm.labels.tolist() == [[1, 2, 1], [1, 2, 1], [1, 1, 1]]
    assert len(layers) == 2


def test_render_constant():
    _, _, lm = _pipeline(depth_from_rows(np.full((4, 5), 77)))
    assert (lm.labels == 1).all()


def test_render_three_plateaus_matches_oracle():
    arr = np.full((12, 12), 20)
    arr[1:5, 1:5] = 80
    arr[6:11, 2:6] = 140
    arr[3:9, 7:11] = 200
    d = depth_from_rows(arr)
    _, layers, lm = _pipeline(d)
    assert len(layers) == 4
    for lo, hi in ((slice(1, 5), slice(1, 5)), (slice(6, 11), slice(2, 6)), (slice(3, 9), slice(7, 11))):
        assert len(np.unique(lm.labels[lo, hi])) == 1
    assert compare_partitions(lm.labels, oracle_object_layers(d, 2)).equivalent


def test_render_detects_inconsistency(u_shape):
    lab, layers, _ = _pipeline(u_shape)
    with pytest.raises(ConsistencyError):
        render_label_map(u_shape, lab, layers[:1])


def test_representative_depth_is_weighted_mode():
    layers = link_object_layers([
        CompoundObject(1, {1}, 5, Counter({10: 5})),
        CompoundObject(2, {1, 2}, 7, Counter({10: 3, 12: 4})),
    ])
    assert len(layers) == 1
    assert layers[0].representative_depth == 10  # 8 pixels at 10 vs 4 at 12
    assert layers[0].pixel_count == 12


def test_run_layering_constant_and_tiny():
    assert len(run_layering(depth_from_rows(np.full((6, 6), 3))).object_layers) == 1
    assert run_layering(depth_from_rows([[9]])).label_map.labels.tolist() == [[1]]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_run_layering_conserves_pixels_and_is_deterministic(seed):
    scene = gen_random_plateaus(seed, size=48)
    r1 = run_layering(scene.depth, seed=seed)
    r2 = run_layering(scene.depth, seed=seed)
    assert np.array_equal(r1.label_map.labels, r2.label_map.labels)
    assert sum(ol.pixel_count for ol in r1.object_layers) == 48 * 48
    assert r1.label_map.labels.min() == 1
    assert r1.label_map.labels.max() == len(r1.object_layers)
    counts = np.bincount(r1.label_map.labels.reshape(-1))[1:]
    assert counts.tolist() == [ol.pixel_count for ol in r1.object_layers]
    assert [ol.depth_rank for ol in r1.object_layers] == list(range(1, len(r1.object_layers) + 1))
    om = object_number_map(r1.labeled)
    assert om.min() == 1 and om.max() == r1.labeled.object_count
