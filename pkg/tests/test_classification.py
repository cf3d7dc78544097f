import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import audit_verdicts, members, random_generators
from twopoint.classification import (FiniteSet, Grid, IndexSet, Ray, classify, classify_dc_spd,
                                     classify_pd, classify_spd, generator_from_json, jk_membership,
                                     regime, split_parity)
from twopoint.errors import SchemaError
from twopoint.expansions import FamilyTerm, KernelSpec
from twopoint.spaces import make_space

S1 = make_space("sphere", 1)
S2 = make_space("sphere", 2)
S3 = make_space("sphere", 3)
P2R = make_space("real_projective", 2)
P3R = make_space("real_projective", 3)
P4C = make_space("complex_projective", 4)
P8H = make_space("quaternion_projective", 8)
CAY = make_space("cayley_plane", 16)
SPACES = [S1, S2, S3, P2R, P3R, P4C, P8H, CAY]
SUPPORTED_PAIRS = [(S2, S3), (S2, P3R), (P4C, S3), (P3R, P8H), (P4C, CAY), (CAY, S2), (P8H, P4C)]

pair_st = st.integers(0, 20)
step_st = st.tuples(st.integers(0, 5), st.integers(0, 5)).filter(lambda s: s != (0, 0))
gen_st = st.one_of(
    st.lists(st.tuples(pair_st, pair_st), min_size=1, max_size=4).map(lambda m: FiniteSet(tuple(m))),
    st.builds(Ray, st.tuples(pair_st, pair_st), step_st),
    st.builds(Grid, st.tuples(pair_st, pair_st), st.tuples(st.integers(1, 5), st.integers(1, 5))),
)
gens_st = st.lists(gen_st, min_size=1, max_size=3)


class TestGenerators:
    def test_membership_examples(self):
        assert jk_membership([Grid((0, 0), (1, 1))], {}, 17, 3)
        assert jk_membership([Ray((1, 2), (2, 0))], {}, 5, 2)
        assert not jk_membership([Ray((1, 2), (2, 0))], {}, 5, 3)
        assert jk_membership([], {(4, 4): 1.0}, 4, 4)
        assert not jk_membership([], {}, 0, 0)

    @given(gen_st)
    def test_contains_matches_enumeration(self, g):
        box = set(g.members_in_box(40, 40))
        brute = {(k, l) for k, l in itertools.product(range(41), repeat=2) if g.contains(k, l)}
        assert box == brute

    def test_vertical_ray(self):
        r = Ray((2, 1), (0, 3))
        assert r.contains(2, 7) and not r.contains(2, 6) and not r.contains(3, 1)

    def test_validation(self):
        with pytest.raises(SchemaError):
            Ray((0, 0), (0, 0))
        with pytest.raises(SchemaError):
            Grid((0, 0), (0, 1))
        with pytest.raises(SchemaError):
            FiniteSet(((1, -1),))
        with pytest.raises(SchemaError):
            generator_from_json({"kind": "spiral"})
        with pytest.raises(SchemaError):
            generator_from_json({"kind": "ray", "start": [0, 0]})

    @given(gen_st)
    def test_json_round_trip(self, g):
        assert generator_from_json(g.to_json()) == g

    @given(gen_st)
    def test_swapped(self, g):
        sw = g.swapped()
        for k, l in itertools.product(range(25), repeat=2):
            assert g.contains(k, l) == sw.contains(l, k)


class TestSplitParity:
    def test_examples(self):
        even, odd = split_parity([Ray((0, 0), (1, 0))])
        assert list(even) == [Ray((0, 0), (2, 0))]
        assert list(odd) == [Ray((1, 0), (2, 0))]
        even, odd = split_parity([FiniteSet(((2, 5),))])
        assert list(even) == [FiniteSet(((2, 5),))] and odd.is_empty
        even, odd = split_parity([Grid((1, 0), (2, 1))])
        assert even.is_empty and list(odd) == [Grid((1, 0), (2, 1))]

    @given(gens_st)
    def test_partition(self, gens):
        even, odd = split_parity(gens)
        jk = IndexSet(tuple(gens))
        for k, l in itertools.product(range(101), repeat=2):
            inside = (k, l) in jk
            e, o = (k, l) in even, (k, l) in odd
            assert not (e and o)
            assert (e or o) == inside
            if e:
                assert k % 2 == 0
            if o:
                assert k % 2 == 1


class TestDcSpd:
    def test_dcsufnec_grid(self):
        r = classify_dc_spd([Grid((0, 0), (1, 1))], P4C, P8H)
        assert (r.dc_spd, r.theorem) == ("yes", "dcsufnec")

    def test_dcsufnec_finite(self):
        r = classify_dc_spd([FiniteSet(((0, 0), (3, 5)))], P3R, P3R)
        assert (r.dc_spd, r.theorem) == ("no", "dcsufnec")
        assert r.witness["failed"] == "finite-sum-set"

    def test_dcsuf_two_rays(self):
        r = classify_dc_spd([Ray((0, 0), (2, 0)), Ray((1, 0), (2, 0))], S2, P3R)
        assert (r.dc_spd, r.theorem) == ("yes", "dcsuf")
        assert len(r.witness["generators"]) == 2

    def test_dcsuf_single_parity(self):
        r = classify_dc_spd([Ray((0, 0), (2, 0))], S2, P3R)
        assert r.dc_spd == "no"
        assert r.witness["failed"] == "missing-odd-parity-sequence"

    def test_dcsuf_sphere_second(self):
        gens = [Ray((0, 0), (0, 2)), Ray((0, 1), (0, 2))]
        assert classify_dc_spd(gens, P3R, S2).dc_spd == "yes"
        assert classify_dc_spd(gens, S2, P3R).dc_spd == "yes"  # non-sphere degrees unbounded
        assert classify_dc_spd([Ray((0, 0), (0, 2))], P3R, S2).dc_spd == "no"

    def test_sphere_pair(self):
        assert classify_dc_spd([Ray((0, 0), (1, 0))], S2, S3).dc_spd == "yes"
        r = classify_dc_spd([Ray((0, 0), (1, 1))], S2, S3)
        assert (r.dc_spd, r.theorem) == ("no", "sphere-pair")

    def test_circle_unsupported(self):
        r = classify_dc_spd([Grid((0, 0), (1, 1))], S1, P3R)
        assert (r.dc_spd, r.theorem) == ("unsupported", "unsupported")

    def test_rp2_note(self):
        r = classify_dc_spd([Grid((0, 0), (1, 1))], S2, P2R)
        assert r.theorem == "dcsuf" and r.notes


class TestSpd:
    def test_diagonal_ray(self):
        r = classify_spd([Ray((0, 0), (1, 1))], P4C, CAY)
        assert (r.spd, r.theorem) == ("yes", "spdnec")

    def test_axis_rays(self):
        r = classify_spd([Ray((0, 0), (1, 0)), Ray((0, 0), (0, 1))], P3R, P3R)
        assert (r.spd, r.witness["failed"]) == ("no", "no-diagonal-sequence")

    def test_parity_grid(self):
        r = classify_spd([Grid((0, 0), (2, 1))], S2, P3R)
        assert (r.spd, r.theorem, r.witness["failed"]) == ("no", "spdnec1", "missing-odd-diagonal")
        r = classify_spd([Grid((0, 0), (2, 1)), Ray((1, 0), (2, 2))], S2, P3R)
        assert r.spd == "yes"

    def test_sphere_pair_unsupported(self):
        assert classify_spd([Grid((0, 0), (1, 1))], S2, S3).spd == "unsupported"


class TestPd:
    def test_any_spec_is_pd(self):
        spec = KernelSpec(S2, P3R, {(0, 1): 1.0})
        r = classify_pd(spec)
        assert r.pd == "yes" and r.theorem == "gangolliext"

    def test_large_bound(self):
        spec = KernelSpec(CAY, P8H, families=[FamilyTerm(Grid((0, 0), (1, 1)), 1.0, 0.999)])
        bound = classify_pd(spec).witness["bound"]
        assert bound == pytest.approx(1e3 ** 8 * 1e3 ** 4, rel=1e-9)

    def test_empty(self):
        r = classify_pd(KernelSpec(S2, S2))
        assert r.pd == "yes" and r.witness["bound"] == 0.0

    def test_combined(self):
        spec = KernelSpec(P4C, P8H, families=[FamilyTerm(Grid((0, 0), (1, 1)))])
        r = classify(spec).to_json()
        assert (r["pd"], r["dc_spd"], r["spd"], r["theorem"]) == ("yes", "yes", "yes", "spdnec")
        spec = KernelSpec(S2, S3, families=[FamilyTerm(Grid((0, 0), (1, 1)))])
        r = classify(spec).to_json()
        assert (r["spd"], r["theorem"]) == ("unsupported", "sphere-pair")


def test_regime_table():
    dc_tags = {"dcsuf", "dcsufnec", "sphere-pair", "unsupported"}
    spd_tags = {"spdnec", "spdnec1", "unsupported"}
    for s1, s2 in itertools.product(SPACES, repeat=2):
        dc, spd = regime(s1, s2)
        assert dc in dc_tags and spd in spd_tags
        if s1.d == 1 and s1.is_sphere or s2.d == 1 and s2.is_sphere:
            assert (dc, spd) == ("unsupported", "unsupported")
        elif s1.is_sphere and s2.is_sphere:
            assert (dc, spd) == ("sphere-pair", "unsupported")
        elif s1.is_sphere or s2.is_sphere:
            assert (dc, spd) == ("dcsuf", "spdnec1")
        else:
            assert (dc, spd) == ("dcsufnec", "spdnec")


@given(gens_st, gen_st, st.sampled_from(SUPPORTED_PAIRS))
def test_monotone_under_adding_generators(gens, extra, pair):
    before_dc = classify_dc_spd(gens, *pair).dc_spd
    before_spd = classify_spd(gens, *pair).spd
    after_dc = classify_dc_spd(gens + [extra], *pair).dc_spd
    after_spd = classify_spd(gens + [extra], *pair).spd
    assert not (before_dc == "yes" and after_dc == "no")
    assert not (before_spd == "yes" and after_spd == "no")


@given(gens_st, st.sampled_from(SUPPORTED_PAIRS))
def test_agrees_with_truncation_auditor(gens, pair):
    verdict = (classify_dc_spd(gens, *pair).dc_spd, classify_spd(gens, *pair).spd)
    assert verdict == audit_verdicts(gens, *pair)


def test_auditor_corpus_balanced():
    rng = np.random.default_rng(7)
    seen = set()
    for i in range(100):
        gens = random_generators(rng)
        s1, s2 = SUPPORTED_PAIRS[i % len(SUPPORTED_PAIRS)]
        seen.add(classify_dc_spd(gens, s1, s2).dc_spd)
        seen.add(classify_spd(gens, s1, s2).spd)
    assert {"yes", "no"} <= seen


def test_members_oracle_self_check():
    assert members([Ray((0, 0), (1, 1))], 3) == {(0, 0), (1, 1), (2, 2), (3, 3)}
