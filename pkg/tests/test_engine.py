"""Construction engine: families, single steps, full runs, cascade, traces."""

import json
import time
from fractions import Fraction

import numpy as np
import pytest

from nullcover.engine import (
    AffineMap,
    ConstructionTrace,
    EngineError,
    FunctionFamily,
    GridSet,
    family_covering_number,
    full_measure_run,
    make_frame_denominator,
    middle_thirds_points,
    rrp_run,
    rrp_step,
    verify_rrp_trace,
)


def criterion_family():
    return FunctionFamily(
        maps=[AffineMap(Fraction(1, 2), Fraction(i, 1 << 20)) for i in range(8)],
        bilipschitz_c=Fraction(2),
    )


def criterion_points():
    return middle_thirds_points(7, grid_exp=12)


class TestFunctionFamily:
    def test_bilipschitz_enforced(self):
        with pytest.raises(EngineError):
            FunctionFamily.scalings([Fraction(1, 4)], c=Fraction(2))
        FunctionFamily.scalings([Fraction(1, 2), Fraction(3, 4)], c=Fraction(2))

    def test_serialization(self):
        fam = criterion_family()
        rt = FunctionFamily.from_json_dict(fam.to_json_dict())
        assert rt.maps == fam.maps

    def test_covering_number_single(self):
        fam = FunctionFamily.scalings([Fraction(1, 2)], c=Fraction(2))
        assert family_covering_number(fam, Fraction(1, 100)) == 1

    def test_covering_number_scalings(self):
        # r in {1/2, 1/2 + delta, ..., 1}: pairwise sup distance |r - r'|
        scales = [Fraction(1, 2) + Fraction(i, 40) for i in range(21)]
        fam = FunctionFamily.scalings(scales, c=Fraction(2))
        n = family_covering_number(fam, Fraction(1, 40))
        # greedy net at delta = spacing: every other map suffices, within factor 2
        assert 7 <= n <= 21
        assert family_covering_number(fam, Fraction(1)) == 1

    def test_named_bound_checked(self):
        scales = [Fraction(1, 2) + Fraction(i, 40) for i in range(21)]
        fam = FunctionFamily.scalings(scales, c=Fraction(2))
        fam.m_bound = lambda d: 1.0
        with pytest.raises(EngineError):
            family_covering_number(fam, Fraction(1, 100))

    def test_hausdorff_image_bound(self):
        # H(f1(A), f2(A)) <= sup |f1 - f2| on samples, exactly
        from nullcover.fractal import hausdorff_distance

        pts = criterion_points()[:40]
        f1, f2 = AffineMap(Fraction(1, 2), 0), AffineMap(Fraction(5, 8), Fraction(1, 64))
        h = hausdorff_distance([(f1(p),) for p in pts], [(f2(p),) for p in pts])
        sup = max(abs(f1(p) - f2(p)) for p in pts)
        assert h <= sup


class TestRRPStep:
    def test_identity_family_dense_grid(self):
        pts = [Fraction(i, 256) for i in range(257)]
        fam = FunctionFamily.scalings([Fraction(1)], c=Fraction(2))
        a_used, T, record = rrp_step(pts, fam, Fraction(0), Fraction(1, 4), Fraction(1, 8), Fraction(1, 4))
        assert T.volume <= Fraction(1, 4) * Fraction(1, 4)
        assert record["within_3q"]

    def test_scaling_family_cantor(self):
        pts = criterion_points()
        scales = [Fraction(1, 2) + Fraction(i, 1 << 10) for i in range(8)]
        fam = FunctionFamily.scalings(scales, c=Fraction(2))
        a_used, T, record = rrp_step(
            pts, fam, Fraction(0), Fraction(1, 2), Fraction(1, 8), Fraction(1, 4)
        )
        assert T.volume <= Fraction(1, 8)
        assert record["threshold_ref_108"] > 0  # margin recorded (negative here)
        assert record["window_points"] == len(a_used)

    def test_budget_error(self):
        pts = [Fraction(0), Fraction(1, 2)]
        fam = FunctionFamily.scalings([Fraction(1)], c=Fraction(2))
        with pytest.raises((EngineError, Exception)):
            rrp_step(pts, fam, Fraction(0), Fraction(1), Fraction(0), Fraction(1, 1024))


class TestRRPRun:
    def test_acceptance_instance(self):
        t0 = time.time()
        trace = rrp_run(
            criterion_points(), criterion_family(), depth=3,
            rho_schedule=[Fraction(1), Fraction(1, 1 << 10), Fraction(1, 1 << 11)],
            piece_w_schedule=[12, 12, 12],
        )
        assert trace.passed
        vols = [s.volume for s in trace.steps]
        assert vols[0] <= Fraction(1, 10)
        assert vols[1] <= Fraction(1, 20)
        assert vols[2] <= Fraction(1, 40)  # 5^-1 * 2^-3
        for s in trace.steps:
            assert s.checks["check_a_nested"]
            assert s.checks["check_b_volume"]
            assert s.checks["check_b_neighborhood"]
            assert s.checks["check_c_coverage"]
        assert time.time() - t0 < 300

    def test_initial_rectangle(self):
        trace = rrp_run(criterion_points(), criterion_family(), depth=1,
                        piece_w_schedule=[12])
        r_lo, r_hi = Fraction(trace.meta["R"][0]), Fraction(trace.meta["R"][1])
        for a, b in criterion_family().to_json_dict()["maps"]:
            f0 = Fraction(a) * 0 + Fraction(b)
            assert f0 + r_lo <= 0 and f0 + r_hi >= 1

    def test_delta_tail(self):
        trace = rrp_run(criterion_points(), criterion_family(), depth=3,
                        rho_schedule=[Fraction(1), Fraction(1, 1 << 10), Fraction(1, 1 << 11)],
                        piece_w_schedule=[12, 12, 12])
        deltas = [Fraction(d) for d in trace.meta["delta_schedule"]]
        for j in range(len(deltas)):
            assert sum(deltas[j:], Fraction(0)) <= 2 * deltas[j]
            assert deltas[j] <= Fraction(1, 1 << j)

    def test_determinism_bitwise(self):
        kw = dict(
            rho_schedule=[Fraction(1), Fraction(1, 1 << 10)], piece_w_schedule=[12, 12]
        )
        t1 = rrp_run(criterion_points(), criterion_family(), depth=2, **kw)
        t2 = rrp_run(criterion_points(), criterion_family(), depth=2, **kw)
        assert t1.content_hash() == t2.content_hash()

    def test_verify_roundtrip_and_tamper(self):
        trace = rrp_run(criterion_points(), criterion_family(), depth=2,
                        rho_schedule=[Fraction(1), Fraction(1, 1 << 10)],
                        piece_w_schedule=[12, 12])
        data = json.loads(json.dumps(trace.to_json_dict()))
        assert verify_rrp_trace(data)["passed"]
        data["steps"][1]["k_intervals"] = data["steps"][1]["k_intervals"][:-5]
        assert not verify_rrp_trace(data)["passed"]

    def test_coverage_is_real(self):
        # independent oracle: pixel mask of f(A') + K_J covers f(a0) + R
        trace = rrp_run(criterion_points(), criterion_family(), depth=2,
                        rho_schedule=[Fraction(1), Fraction(1, 1 << 10)],
                        piece_w_schedule=[12, 12])
        step = trace.steps[-1]
        pts = criterion_points()
        grid = 1 << 14
        for a, b in [criterion_family().to_json_dict()["maps"][i] for i in (0, 7)]:
            f = AffineMap(Fraction(a), Fraction(b))
            mask = np.zeros(grid + 1, dtype=bool)
            for lo, hi in step.k_intervals:
                for p in pts:
                    s = int(np.ceil(float((f(p) + lo) * grid)))
                    e = int(np.floor(float((f(p) + hi) * grid)))
                    mask[max(s, 0) : min(e, grid) + 1] = True
            lo_t = int(np.ceil(float((f(pts[0]) + Fraction(trace.meta["R"][0])) * grid)))
            hi_t = int(np.floor(float((f(pts[0]) + Fraction(trace.meta["R"][1])) * grid)))
            assert mask[max(lo_t, 0) : min(hi_t, grid) + 1].all()


class TestFullMeasure:
    def test_criterion_instance(self):
        grid = GridSet(spacing_exponent=50, region=[(Fraction(0), Fraction(1, 2))])
        t0 = time.time()
        trace = full_measure_run(grid, Fraction(1, 2), depth=3)
        assert trace.passed
        for s in trace.steps[1:]:
            assert s.measure <= Fraction(1, 1 << s.j)
            assert s.checks["check_d_uncovered"]
            assert s.checks["check_b_nested_4q"]
        assert trace.steps[0].measure == 2  # seed convention
        assert time.time() - t0 < 300

    def test_uncovered_bounds_tighten(self):
        grid = GridSet(spacing_exponent=50, region=[(Fraction(0), Fraction(1, 2))])
        trace = full_measure_run(grid, Fraction(1, 2), depth=3)
        for s in trace.steps[1:]:
            bound = Fraction(s.checks["uncovered_bound"])
            assert bound == (1 - Fraction(1, 1 << s.j)) * Fraction(1, 2)
            assert Fraction(s.checks["uncovered_value"]) <= bound

    def test_largeness_error_names_requirement(self):
        coarse = GridSet(spacing_exponent=12, region=[(Fraction(0), Fraction(1, 2))])
        with pytest.raises(EngineError, match="N'"):
            full_measure_run(coarse, Fraction(1, 2), depth=2)

    def test_determinism(self):
        grid = GridSet(spacing_exponent=50, region=[(Fraction(0), Fraction(1, 2))])
        t1 = full_measure_run(grid, Fraction(1, 2), depth=2)
        t2 = full_measure_run(grid, Fraction(1, 2), depth=2)
        assert t1.content_hash() == t2.content_hash()

    def test_grid_counting(self):
        grid = GridSet(spacing_exponent=4, region=[(Fraction(0), Fraction(1, 2))])
        assert grid.count_in(Fraction(0), Fraction(1)) == 8
        assert grid.count_in(Fraction(0), Fraction(1, 4)) == 4


def test_frame_denominator():
    fam = criterion_family()
    pts = [Fraction(1, 3), Fraction(1, 4)]
    D = make_frame_denominator(pts, fam, g_max=12)
    for f in fam.maps:
        for p in pts:
            assert (f(p) * D).denominator == 1
    assert D % (1 << 12) == 0


def test_trace_json_shape():
    trace = rrp_run(criterion_points(), criterion_family(), depth=1, piece_w_schedule=[12])
    d = trace.to_json_dict()
    assert d["schema"] == "nullcover/1" and d["kind"] == "rrp"
    assert isinstance(d["steps"][0]["k_intervals"], list)
