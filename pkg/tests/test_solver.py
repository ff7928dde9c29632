"""
递归求解器测试：精确性、查询、轨迹、校验与结果目录
"""

import json

import numpy as np
import pytest

from conftest import reference_distances, undirected
from rapid_apsp.graph.csr import Graph
from rapid_apsp.graph.generators import gen_er, gen_nws
from rapid_apsp.graph.tropical import INF
from rapid_apsp.partitioning.hierarchy import LevelKind
from rapid_apsp.solver import (
    KernelChoice,
    SolverConfig,
    Stage,
    Step,
    dijkstra,
    load_result,
    recursive_solver,
    save_result,
    solve_apsp,
    verify_against_oracle,
)
from rapid_apsp.solver.persistence import MANIFEST_FILE
from rapid_apsp.solver.verifier import choose_sources
from rapid_apsp.utils.error_handling import ArgumentError, SchemaError, VertexRangeError


def config(**overrides):
    return SolverConfig(**overrides)


class TestExactness:
    """递归结果与整图 FW 逐项相同"""

    def test_degenerate_recursion(self, small_er):
        result = solve_apsp(small_er, config(tile_limit=64))
        assert result.hierarchy.depth == 1
        assert np.array_equal(result.dense(), reference_distances(small_er))

    @pytest.mark.parametrize("tile_limit", [16, 32, 64])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_sparse_graphs(self, tile_limit, seed):
        g = gen_nws(150, 4, 0.05, seed=seed)
        result = solve_apsp(g, config(tile_limit=tile_limit))
        if tile_limit < 150:
            assert result.hierarchy.depth >= 2
        assert np.array_equal(result.dense(), reference_distances(g))

    @pytest.mark.parametrize("seed", [3, 4])
    def test_directed_random_graphs(self, seed):
        g = gen_er(120, 2.0, seed=seed)
        result = solve_apsp(g, config(tile_limit=32))
        assert np.array_equal(result.dense(), reference_distances(g))

    def test_blocked_top(self):
        edges = [(u, v, 1 + (u * 7 + v) % 13) for u in range(40) for v in range(u + 1, 40)]
        g = undirected(40, edges)
        result = solve_apsp(g, config(tile_limit=16))
        assert result.hierarchy.top.kind == LevelKind.BLOCKED
        assert not result.trace.top_within_tile
        assert np.array_equal(result.dense(), reference_distances(g))

    def test_remapped_kernel(self, ring_graph):
        classic = solve_apsp(ring_graph, config(tile_limit=32))
        remapped = solve_apsp(ring_graph, config(tile_limit=32, kernel=KernelChoice.REMAPPED))
        assert np.array_equal(classic.dense(), remapped.dense())

    def test_materialized_cross_blocks(self, ring_graph):
        lazy = solve_apsp(ring_graph, config(tile_limit=32))
        eager = solve_apsp(ring_graph, config(tile_limit=32, materialize_cross=True))
        comps = len(eager.root.components)
        assert len(eager.root.cached_pairs) == comps * (comps - 1)
        assert np.array_equal(lazy.dense(), eager.dense())

    def test_workers_do_not_change_anything(self, ring_graph):
        serial = solve_apsp(ring_graph, config(tile_limit=32, instrument=True))
        parallel = solve_apsp(ring_graph, config(tile_limit=32, instrument=True, workers=4))
        assert np.array_equal(serial.dense(), parallel.dense())
        assert serial.trace.kernels == parallel.trace.kernels
        assert serial.trace.transfers == parallel.trace.transfers

    def test_imported_assignment(self, path4):
        result = solve_apsp(path4, config(tile_limit=2), assignment=[0, 0, 1, 1])
        assert result.query(0, 3) == 3
        assert result.hierarchy.levels[0].assignment.tolist() == [0, 0, 1, 1]

    def test_depth_independent_answers(self, ring_graph):
        answers = []
        depths = set()
        for tile_limit in (16, 32, 64):
            result = solve_apsp(ring_graph, config(tile_limit=tile_limit))
            answers.append(result.block(range(0, 160, 7), range(3, 160, 11)))
            depths.add(result.hierarchy.depth)
        assert all(np.array_equal(a, answers[0]) for a in answers[1:])
        assert len(depths) > 1


SWEEP_SIZES = (50, 120, 256, 512)
SWEEP_DEGREES = (4, 8, 25)
SWEEP_SEEDS = range(5)


def sweep_graph(topology, n, degree, seed):
    if topology == "er":
        return gen_er(n, float(degree), seed=seed)
    k = degree - degree % 2
    return gen_nws(n, k, 0.05, seed=seed)


@pytest.mark.slow
class TestExactnessSweep:
    """ER 与 NWS、n ∈ [50, 512]、度 {4, 8, 25} 的种子图，逐项对照整图 FW"""

    @pytest.mark.parametrize("seed", SWEEP_SEEDS)
    @pytest.mark.parametrize("degree", SWEEP_DEGREES)
    @pytest.mark.parametrize("n", SWEEP_SIZES)
    @pytest.mark.parametrize("topology", ["er", "nws"])
    def test_matches_full_fw(self, topology, n, degree, seed):
        g = sweep_graph(topology, n, degree, seed)
        tile_limit = (16, 32, 64)[seed % 3]
        if tile_limit >= n:
            tile_limit = 16
        result = solve_apsp(g, config(tile_limit=tile_limit))
        assert len(result.hierarchy.levels[0].components) > 1
        assert np.array_equal(result.dense(), reference_distances(g))


class TestQuery:
    """点对查询"""

    def test_self_distance(self, ring_graph):
        result = solve_apsp(ring_graph, config(tile_limit=32))
        assert all(result.query(u, u) == 0 for u in range(0, 160, 13))

    def test_adjacent_pair(self, triangle):
        result = solve_apsp(triangle, config(tile_limit=4))
        assert result.query(1, 2) == 2
        assert result.query(0, 2) == 7

    def test_disconnected(self, two_islands):
        result = solve_apsp(two_islands, config(tile_limit=3))
        assert result.query(0, 4) == INF
        assert result.query(0, 2) == 5
        assert result.query(3, 5) == 2

    def test_matches_dijkstra(self, ring_graph):
        result = solve_apsp(ring_graph, config(tile_limit=16))
        for u in (0, 57, 131):
            assert np.array_equal(result.row(u), dijkstra(ring_graph, u))

    def test_cross_component_query_is_one_merge(self, ring_graph, monkeypatch):
        result = solve_apsp(ring_graph, config(tile_limit=16))
        root = result.root
        assert len(root.components) > 1
        u = int(root.components[0].members[-1])
        v = int(root.components[1].members[-1])
        root.boundary_block(0, 1)

        shapes = []
        real_merge = recursive_solver.cross_merge

        def counting(*args, **kwargs):
            out = real_merge(*args, **kwargs)
            shapes.append(out.shape)
            return out

        monkeypatch.setattr(recursive_solver, "cross_merge", counting)
        assert result.query(u, v) == reference_distances(ring_graph)[u, v]
        assert shapes == [(1, 1)]
        assert root.cached_pairs == []

    def test_out_of_range(self, triangle):
        result = solve_apsp(triangle, config(tile_limit=4))
        with pytest.raises(ArgumentError):
            result.query(0, 3)

    def test_empty_graph(self):
        result = solve_apsp(Graph.empty(0), config(tile_limit=4))
        assert result.dense().shape == (0, 0)


class TestTrace:
    """执行轨迹"""

    def test_single_component_has_no_cross_traffic(self, small_er):
        result = solve_apsp(small_er, config(tile_limit=64))
        by_stage = result.trace.bytes_by_stage()
        assert by_stage[Stage.MP_FETCH] == 0
        assert by_stage[Stage.BOUNDARY_SYNC] == 0
        assert by_stage[Stage.BOUNDARY_FETCH] == 0
        assert by_stage[Stage.CSR_STREAM_IN] > 0
        assert [k.step for k in result.trace.kernels] == [Step.INTRA]

    def test_recursive_steps_recorded(self, ring_graph):
        result = solve_apsp(ring_graph, config(tile_limit=32))
        steps = {k.step for k in result.trace.kernels}
        assert {Step.INTRA, Step.INJECT, Step.CROSS} <= steps
        level0 = result.hierarchy.levels[0]
        comps = len(level0.components)
        cross = [k for k in result.trace.kernels if k.level == 0 and k.step == Step.CROSS]
        assert len(cross) == comps * (comps - 1)
        assert all(k.stages == 2 for k in cross)

    def test_kernels_fit_tile(self, ring_graph):
        result = solve_apsp(ring_graph, config(tile_limit=16))
        assert all(k.rows <= 16 for k in result.trace.kernels if k.kernel.value == "fw")

    def test_instrumented_counts(self, small_er):
        plain = solve_apsp(small_er, config(tile_limit=64))
        counted = solve_apsp(small_er, config(tile_limit=64, instrument=True))
        assert all(k.updates is None for k in plain.trace.kernels)
        assert counted.trace.instrumented
        assert counted.trace.total_updates() > 0

    def test_config_echo(self, small_er):
        result = solve_apsp(small_er, config(tile_limit=64))
        assert result.trace.config["tile_limit"] == 64
        assert len(result.trace.config_hash) == 64


class TestVerifier:
    """Dijkstra 抽样校验"""

    def test_exact_solver_passes(self, ring_graph):
        result = solve_apsp(ring_graph, config(tile_limit=16))
        report = verify_against_oracle(ring_graph, result, sample=8, seed=3)
        assert report.passed
        assert report.checked_pairs == 8 * 160
        assert report.summary().passed

    def test_corruption_detected(self, small_er):
        result = solve_apsp(small_er, config(tile_limit=64))
        dist = result.root.distances[0]
        finite = np.argwhere((dist != INF) & (dist != 0))
        i, j = (int(x) for x in finite[0])
        dist[i, j] -= 1
        report = verify_against_oracle(small_er, result, sample=small_er.n)
        assert not report.passed
        assert report.mismatches[0].actual == report.mismatches[0].expected - 1

    def test_full_sample_equals_dense_check(self, small_er):
        result = solve_apsp(small_er, config(tile_limit=8))
        report = verify_against_oracle(small_er, result, sample=small_er.n)
        assert report.passed
        assert report.sources == list(range(small_er.n))
        assert np.array_equal(result.dense(), reference_distances(small_er))

    def test_sources_are_seeded(self):
        assert choose_sources(100, 5, 1) == choose_sources(100, 5, 1)
        assert len(set(choose_sources(100, 5, 1))) == 5
        assert choose_sources(4, 10, 0) == [0, 1, 2, 3]

    def test_bad_sample(self, small_er):
        result = solve_apsp(small_er, config(tile_limit=64))
        with pytest.raises(ArgumentError):
            verify_against_oracle(small_er, result, sample=0)

    def test_dijkstra_range(self, small_er):
        with pytest.raises(VertexRangeError):
            dijkstra(small_er, 16)


class TestPersistence:
    """结果目录读写"""

    def test_roundtrip(self, tmp_path, ring_graph):
        result = solve_apsp(ring_graph, config(tile_limit=16))
        save_result(result, tmp_path / "run")
        loaded = load_result(tmp_path / "run")
        assert loaded.hierarchy.depth == result.hierarchy.depth
        assert loaded.config == result.config
        assert np.array_equal(loaded.dense(), result.dense())

    def test_roundtrip_materialized(self, tmp_path, ring_graph):
        result = solve_apsp(ring_graph, config(tile_limit=32, materialize_cross=True))
        save_result(result, tmp_path / "run")
        loaded = load_result(tmp_path / "run")
        assert loaded.root.cached_pairs == result.root.cached_pairs
        assert np.array_equal(loaded.dense(), result.dense())

    def test_roundtrip_blocked(self, tmp_path):
        edges = [(u, v, 1 + (u + v) % 5) for u in range(30) for v in range(u + 1, 30)]
        g = undirected(30, edges)
        result = solve_apsp(g, config(tile_limit=12))
        path = save_result(result, tmp_path / "run")
        assert json.loads(path.read_text())["top_within_tile"] is False
        assert np.array_equal(load_result(tmp_path / "run").dense(), result.dense())

    def test_manifest_echoes_config(self, tmp_path, small_er):
        result = solve_apsp(small_er, config(tile_limit=64))
        path = save_result(result, tmp_path / "run")
        manifest = json.loads(path.read_text())
        assert path.name == MANIFEST_FILE
        assert manifest["kind"] == "result_manifest"
        assert manifest["config"]["tile_limit"] == 64
        assert manifest["top_within_tile"] is True
        assert manifest["tool_version"].startswith("rapid-apsp")

    def test_schema_version_checked(self, tmp_path, small_er):
        result = solve_apsp(small_er, config(tile_limit=64))
        path = save_result(result, tmp_path / "run")
        manifest = json.loads(path.read_text())
        manifest["schema_version"] = 99
        path.write_text(json.dumps(manifest))
        with pytest.raises(SchemaError):
            load_result(tmp_path / "run")
