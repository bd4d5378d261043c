"""Parameter selection, Gauss complements, coverage bounds, lifts, patches."""

from fractions import Fraction

import numpy as np
import pytest

from nullcover.bias_sets import (
    ParameterError,
    PropositionParams,
    build_bias_complement,
    build_patch_template,
    choose_patch_k,
    continuous_patch_complement,
    coverage_threshold,
    integer_cover_in_box,
    lift_to_signed_box,
    select_parameters,
    verify_coverage_bound,
)
from nullcover.groups import FiniteAbelianGroup, GroupSubset, linear_bias, sumset


def select_parameters_oracle(eta, m0):
    """Direct search following the derivation: first prime, then first power."""
    k = None
    n = 2
    while True:
        ok = all(n % d for d in range(2, n))
        if ok and 1 / eta <= n <= 2 / eta:
            k = n
            break
        n += 1
        if n > 1000:
            raise AssertionError
    s = 1
    while 2 ** (s * (k - 1)) < m0:
        s += 1
    return k, s, 2 ** (s * (k - 1))


class TestSelectParameters:
    def test_example_small(self):
        p = select_parameters(Fraction(1, 3), 1, 1)
        assert (p.k, p.s, p.m, p.q) == (3, 1, 4, 4)
        assert (p.q - 1) % p.k == 0

    def test_example_m0_10(self):
        p = select_parameters(Fraction(1, 3), 10, 1)
        assert (p.k, p.s, p.m, p.q) == (3, 2, 16, 16)
        assert (p.q - 1) % p.k == 0
        assert p.m <= 4**3 * 10

    @pytest.mark.parametrize("eta", [Fraction(1, 3), Fraction(1, 4), Fraction(1, 5), Fraction(1, 8)])
    @pytest.mark.parametrize("m0", [1, 2, 7, 64, 1000])
    def test_matches_oracle(self, eta, m0):
        k, s, m = select_parameters_oracle(eta, m0)
        if 2 ** (s * (k - 1)) > 1 << 24:
            with pytest.raises(ParameterError):
                select_parameters(eta, m0, 1)
            return
        p = select_parameters(eta, m0, 1)
        assert (p.k, p.s, p.m) == (k, s, m)

    def test_cap_error_reports_minimum(self):
        with pytest.raises(ParameterError, match="minimal admissible cap"):
            select_parameters(Fraction(1, 16), 1, 2)  # k = 17 -> q = 2^32

    def test_invalid_eta(self):
        with pytest.raises(ParameterError):
            select_parameters(Fraction(1, 2), 1, 1)


class TestBiasComplement:
    def test_q4_cubes(self):
        p = select_parameters(Fraction(1, 3), 1, 1)
        comp = build_bias_complement(p)
        # x^3 = 1 for every x in F_4^*
        assert comp.size == 1
        assert list(comp.codes) == [1]
        assert comp.size <= Fraction(1, 3) * 4

    def test_q16(self):
        p = select_parameters(Fraction(1, 3), 10, 1)
        comp = build_bias_complement(p)
        assert comp.size == 5
        assert comp.size <= Fraction(1, 3) * 16  # 5 <= 5.33
        assert comp.bias < Fraction(1, 4)  # 1/sqrt(16)
        # oracle: exhaustive cubing in F_16
        from nullcover.gf import make_field

        spec = make_field(2, 4)
        cubes = sorted({(spec.from_code(c) ** 3).code for c in range(1, 16)})
        assert list(comp.codes) == cubes

    def test_certificate(self):
        p = select_parameters(Fraction(1, 4), 4, 1)
        cert = build_bias_complement(p).certificate()
        assert cert["size_ok"] and cert["bias_ok"]

    def test_reinterpretation_reported(self):
        p = select_parameters(Fraction(1, 3), 10, 1)
        comp = build_bias_complement(p, reinterpret=True)
        assert comp.reinterpreted is not None
        assert comp.reinterpreted.group.moduli == (16,)
        assert comp.reinterpreted.size == comp.size
        assert comp.reinterpreted_bias is not None

    def test_include_zero(self):
        p = select_parameters(Fraction(1, 3), 10, 1)
        comp = build_bias_complement(p, include_zero=True)
        assert comp.size == 6

    @pytest.mark.parametrize("eta,m0,d", [(Fraction(1, 3), 1, 1), (Fraction(1, 3), 10, 1), (Fraction(1, 3), 2, 2), (Fraction(1, 4), 2, 1)])
    def test_bias_exact_vs_float(self, eta, m0, d):
        comp = build_bias_complement(select_parameters(eta, m0, d))
        g = comp.subset.group
        vals = np.fft.fftn(comp.subset.mask.astype(float).reshape(g.moduli)).reshape(-1)
        ref = np.abs(vals[1:]).max() / g.order
        assert abs(float(comp.bias) - ref) < 1e-12


class TestCoverageBound:
    def test_whole_group(self):
        p = select_parameters(Fraction(1, 3), 10, 1)
        comp = build_bias_complement(p)
        g = comp.subset.group
        A = GroupSubset(g, np.ones(g.order, dtype=bool))
        cert = verify_coverage_bound(A, comp.subset, p.eta, bias=comp.bias)
        assert cert.sumset_size == g.order and cert.ratio == 1
        assert cert.lemma_ok and cert.headline_ok

    def test_nine_element_sets_q16(self):
        # spec workthrough: bound 1.25 -> |A+B| >= 13 for random 9-subsets
        p = select_parameters(Fraction(1, 3), 10, 1)
        comp = build_bias_complement(p)
        g = comp.subset.group
        rng = np.random.default_rng(31)
        for _ in range(200):
            idx = rng.choice(16, size=9, replace=False)
            mask = np.zeros(16, dtype=bool)
            mask[idx] = True
            cert = verify_coverage_bound(GroupSubset(g, mask), comp.subset, p.eta, bias=comp.bias)
            assert cert.headline_bound == Fraction(5, 4)
            assert cert.lemma_ok
            assert cert.sumset_size >= 13  # headline holds here
            assert cert.headline_ok

    def test_singleton_q16_eta_third(self):
        # ratio 16/5 = 3.2 <= 3.25: tight but passing
        p = select_parameters(Fraction(1, 3), 10, 1)
        comp = build_bias_complement(p)
        g = comp.subset.group
        A = GroupSubset.from_members(g, [(0,) * 4])
        cert = verify_coverage_bound(A, comp.subset, p.eta, bias=comp.bias)
        assert cert.sumset_size == 5
        assert cert.headline_bound == Fraction(13, 4)
        assert cert.headline_ok and cert.lemma_ok

    def test_singleton_q4_headline_fails_lemma_holds(self):
        # documented defect of the headline constant: q=4, eta=1/3, |B*|=1
        p = select_parameters(Fraction(1, 3), 1, 1)
        comp = build_bias_complement(p)
        g = comp.subset.group
        A = GroupSubset.from_members(g, [(0, 0)])
        cert = verify_coverage_bound(A, comp.subset, p.eta, bias=comp.bias)
        assert cert.ratio == 4
        assert cert.headline_bound == Fraction(13, 4)
        assert not cert.headline_ok  # the stated constant is violated
        assert cert.lemma_ok  # the actual lemma never is

    def test_lemma_never_fails_random(self):
        rng = np.random.default_rng(7)
        for eta, m0, d in [(Fraction(1, 3), 1, 1), (Fraction(1, 3), 10, 1), (Fraction(1, 4), 2, 1)]:
            p = select_parameters(eta, m0, d)
            comp = build_bias_complement(p)
            g = comp.subset.group
            for _ in range(300):
                mask = rng.random(g.order) < rng.uniform(0.05, 0.95)
                if not mask.any():
                    continue
                cert = verify_coverage_bound(GroupSubset(g, mask), comp.subset, p.eta, bias=comp.bias)
                assert cert.lemma_ok

    def test_empty_a(self):
        p = select_parameters(Fraction(1, 3), 1, 1)
        comp = build_bias_complement(p)
        g = comp.subset.group
        with pytest.raises(ParameterError):
            verify_coverage_bound(GroupSubset(g, np.zeros(4, dtype=bool)), comp.subset, p.eta)


class TestSignedBoxLift:
    def test_singleton(self):
        g = FiniteAbelianGroup((8,))
        B = GroupSubset.from_members(g, [(0,)])
        box = lift_to_signed_box(B, 8, 1)
        assert box.points.reshape(-1).tolist() == [-8, 0]

    def test_two_points_m4(self):
        g = FiniteAbelianGroup((4,))
        B = GroupSubset.from_members(g, [(1,), (3,)])
        box = lift_to_signed_box(B, 4, 1)
        assert box.points.reshape(-1).tolist() == [-3, -1, 1, 3]

    def test_size_bound_d2(self):
        g = FiniteAbelianGroup((5, 5))
        rng = np.random.default_rng(3)
        mask = np.zeros(25, dtype=bool)
        mask[rng.choice(25, 5, replace=False)] = True
        B = GroupSubset(g, mask)
        box = lift_to_signed_box(B, 5, 2)
        assert box.size <= 4 * B.size

    @pytest.mark.parametrize("m,d", [(16, 1), (8, 2)])
    def test_coverage_equivalence(self, m, d):
        # integer-sum coverage inside [m]^d equals cyclic coverage
        g = FiniteAbelianGroup((m,) * d)
        rng = np.random.default_rng(11)
        for _ in range(100):
            mb = rng.random(g.order) < 0.2
            ma = rng.random(g.order) < 0.3
            if not mb.any() or not ma.any():
                continue
            B = GroupSubset(g, mb)
            A = GroupSubset(g, ma)
            box = lift_to_signed_box(B, m, d)
            a_pts = np.array(A.members(), dtype=np.int64).reshape(-1, d)
            integer_mask = integer_cover_in_box(a_pts, box, m)
            cyclic_mask = sumset(A, B).mask
            assert np.array_equal(integer_mask, cyclic_mask)

    def test_exhaustive_small(self):
        # all B, all A over Z_4: exhaustive equivalence
        g = FiniteAbelianGroup((4,))
        for bm in range(1, 16):
            B = GroupSubset(g, [(bm >> i) & 1 for i in range(4)])
            box = lift_to_signed_box(B, 4, 1)
            for am in range(1, 16):
                A = GroupSubset(g, [(am >> i) & 1 for i in range(4)])
                a_pts = np.array(A.members(), dtype=np.int64)
                got = integer_cover_in_box(a_pts, box, 4)
                assert np.array_equal(got, sumset(A, B).mask)


class TestPatchTemplate:
    def test_coverage_threshold(self):
        # least N with 1 + K/N <= 1/(1-eps), i.e. N >= K(1-eps)/eps
        assert coverage_threshold(Fraction(100), Fraction(1, 2)) == 100
        assert coverage_threshold(Fraction(100), Fraction(1, 16)) == 1500
        assert coverage_threshold(Fraction(7, 2), Fraction(1, 3)) == 7

    def test_choose_k_capacity_aware(self):
        # eta_prop = 1/12 admits k in {13,17,19,23}; for min_m = 30000 the
        # smallest field comes from k = 17 (2^16), not k = 13 (2^24)
        k, s = choose_patch_k(Fraction(1, 12), 30000)
        assert (k, s) == (17, 1)

    def test_template_budget_and_bias(self):
        tpl = build_patch_template(Fraction(1, 2), Fraction(1, 4), wraps=(-1, 0, 1), min_m=64)
        assert tpl.cell_count <= tpl.budget_cells
        assert tpl.bias ** 2 * tpl.params.q < 1

    def test_cyclic_uncovered_exact(self):
        tpl = build_patch_template(Fraction(1, 2), Fraction(1, 4), wraps=(-1, 0, 1), min_m=64)
        m = tpl.m
        rng = np.random.default_rng(5)
        a_cells = np.flatnonzero(rng.random(m) < 0.5)
        u = tpl.cyclic_uncovered(a_cells)
        # brute-force oracle
        covered = set()
        for a in a_cells:
            for b in tpl.prop_cells:
                covered.add((int(a) + int(b)) % m)
        assert u == m - len(covered)

    def test_threshold_guarantee(self):
        # any A meeting the operative threshold leaves at most eps*m uncovered
        tpl = build_patch_template(Fraction(1, 2), Fraction(1, 4), wraps=(-1, 0, 1), min_m=64)
        m = tpl.m
        rng = np.random.default_rng(9)
        for _ in range(20):
            size = tpl.threshold_nz + int(rng.integers(0, m // 4))
            a_cells = rng.choice(m, size=min(size, m), replace=False)
            u = tpl.cyclic_uncovered(a_cells)
            assert u <= tpl.eps * m


class TestContinuousPatch:
    def test_measure_bound_example(self):
        # d=1, Q = [-1, 1], eta = 1/2: measure <= eta * |Q| = 1
        patch = continuous_patch_complement(
            cube_corner=Fraction(-1), side=Fraction(2), delta=Fraction(1, 64),
            eta=Fraction(1, 2), eps=Fraction(1, 4),
        )
        assert patch.measure <= 1
        cert = patch.certificate()
        assert cert["measure_ok"]

    def test_delta_too_large(self):
        with pytest.raises(ParameterError):
            continuous_patch_complement(0, Fraction(1, 4), Fraction(1, 2), Fraction(1, 2), Fraction(1, 4))

    def test_full_grid_family_coverage(self):
        # A = full operative grid of [0, side]: coverage of a0 + Q is complete
        # up to the eps certificate, pixel-checked at delta_op / 2
        side = Fraction(1)
        patch = continuous_patch_complement(
            cube_corner=Fraction(3, 4), side=side, delta=Fraction(1, 128),
            eta=Fraction(1, 2), eps=Fraction(1, 4),
        )
        tpl = patch.template
        m = tpl.m
        a_cells = np.arange(m, dtype=np.int64)
        assert tpl.cyclic_uncovered(a_cells) == 0
        # interval-level verification for one a0: a0 + Q subset of A + B
        a0 = Fraction(5, 17)  # arbitrary point of [0,1]
        w = side / m
        # A points: cell centers, in half-cell pixel units relative to a0 + corner
        lo = a0 + patch.cube_corner
        pts = (np.arange(m) * 2 + 1).astype(np.int64)  # i*w + w/2 in units of w/2
        off = float((Fraction(0) - lo) / (w / 2))
        starts = np.array([float((u) / (w / 2)) for u, _ in patch.intervals()])
        ends = np.array([float((v) / (w / 2)) for _, v in patch.intervals()])
        npix = 2 * m * 3
        pix = np.zeros(npix + 4, dtype=bool)
        s_all = (pts[:, None] + starts[None, :] + off).reshape(-1)
        e_all = (pts[:, None] + ends[None, :] + off).reshape(-1)
        i0 = np.ceil(s_all - 1e-9).astype(np.int64)
        i1 = np.floor(e_all + 1e-9).astype(np.int64)
        keep = (i1 > i0) & (i1 > 0) & (i0 < npix)
        for a, b in zip(np.clip(i0[keep], 0, npix), np.clip(i1[keep], 0, npix)):
            pix[a:b] = True
        target_pix = int(2 * m)  # side / (w/2)
        covered = int(pix[:target_pix].sum())
        assert covered >= (1 - float(tpl.eps)) * target_pix
