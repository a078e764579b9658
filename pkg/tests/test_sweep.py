import numpy as np
import pytest

from condsweep.errors import InvalidArgument
from condsweep.generator import GeneratorBackend
from condsweep.sweep import (
    CSV_HEADER,
    SweepConfig,
    SweepRecord,
    SweepResult,
    detect_alpha_star,
    replicate_sweep,
    run_sweep,
    to_csv,
    to_svg,
)

SMALL = SweepConfig(n=120, sigma=0.55, steps=6, grid_resolution=24)


def _records(counts):
    n = len(counts)
    return [
        SweepRecord(
            alpha=i / (n - 1),
            components=c,
            watertight_components=min(c, 1),
            vertices=10,
            faces=10,
            oracle_components=c,
        )
        for i, c in enumerate(counts)
    ]


class TestDetectAlphaStar:
    def test_example_jump(self):
        recs = _records([1, 1, 1, 4, 5, 5])
        assert detect_alpha_star(recs, persistence=2) == recs[3].alpha

    def test_all_ones_absent(self):
        assert detect_alpha_star(_records([1, 1, 1, 1]), persistence=2) is None

    def test_isolated_blip_rejected(self):
        recs = _records([1, 2, 1, 2, 2, 2])
        assert detect_alpha_star(recs, persistence=2) == recs[3].alpha

    def test_persistence_one_accepts_blip(self):
        recs = _records([1, 2, 1, 1])
        assert detect_alpha_star(recs, persistence=1) == recs[1].alpha

    def test_validation(self):
        with pytest.raises(InvalidArgument):
            detect_alpha_star(_records([1, 1]), persistence=0)


class TestSweepResult:
    def test_alpha_ordering_enforced(self):
        recs = _records([1, 2, 3])
        with pytest.raises(InvalidArgument):
            SweepResult(tuple(reversed(recs)), None, SMALL)

    def test_endpoints_enforced(self):
        recs = _records([1, 2, 3])[:-1]
        with pytest.raises(InvalidArgument):
            SweepResult(tuple(recs), None, SMALL)


class TestRunSweep:
    def test_small_sweep_shape(self):
        result = run_sweep(SMALL)
        assert len(result.records) == SMALL.steps
        assert result.records[0].alpha == 0.0
        assert result.records[-1].alpha == 1.0
        for r in result.records:
            assert r.components >= r.watertight_components >= 0
            assert r.oracle_components is not None

    def test_sigma_zero_all_identical_no_star(self):
        result = run_sweep(SweepConfig(n=80, sigma=0.0, steps=4, grid_resolution=16))
        first = result.records[0]
        for r in result.records[1:]:
            assert (r.components, r.vertices, r.faces) == (
                first.components,
                first.vertices,
                first.faces,
            )
        assert result.alpha_star is None

    def test_deterministic_csv(self):
        a = to_csv(run_sweep(SMALL))
        b = to_csv(run_sweep(SMALL))
        assert a == b

    def test_steps_validation(self):
        with pytest.raises(InvalidArgument):
            run_sweep(SweepConfig(steps=1))

    def test_mesh_sink_called_per_step(self):
        seen = []
        run_sweep(
            SweepConfig(n=60, sigma=0.3, steps=3, grid_resolution=16),
            mesh_sink=lambda i, rec, mesh: seen.append((i, rec.alpha, mesh.num_triangles)),
        )
        assert [s[0] for s in seen] == [0, 1, 2]
        assert seen[0][2] > 0

    def test_balls_backend_sweep(self):
        config = SweepConfig(
            n=60,
            sigma=0.5,
            steps=4,
            grid_resolution=24,
            backend=GeneratorBackend("balls", {}),
        )
        result = run_sweep(config)
        assert len(result.records) == 4


class TestReplicate:
    def test_same_seed_twice_identical(self):
        config = SweepConfig(n=60, sigma=0.4, steps=4, grid_resolution=16)
        results, _ = replicate_sweep(config, [7, 7])
        assert to_csv(results[0]) == to_csv(results[1])

    def test_dispersion_keys(self):
        config = SweepConfig(n=60, sigma=0.6, steps=6, grid_resolution=16, persistence=2)
        results, dispersion = replicate_sweep(config, [1, 2, 3])
        assert len(results) == 3
        if dispersion is not None:
            assert dispersion["min"] <= dispersion["median"] <= dispersion["max"]


class TestOutputs:
    def test_csv_format(self):
        recs = _records([1, 1, 2, 2])
        result = SweepResult(tuple(recs), recs[2].alpha, SMALL)
        text = to_csv(result)
        lines = text.splitlines()
        assert lines[0] == CSV_HEADER
        assert (
            CSV_HEADER
            == "alpha,components,watertight_components,vertices,faces,oracle_components"
        )
        assert len(lines) == 5
        assert lines[1] == "0.000000,1,1,10,10,1"
        assert text.endswith("\n")

    def test_svg_structure(self):
        recs = _records([1, 2, 3])
        svg = to_svg(SweepResult(tuple(recs), None, SMALL))
        assert svg.startswith("<svg")
        assert "<polyline" in svg and "alpha" in svg
