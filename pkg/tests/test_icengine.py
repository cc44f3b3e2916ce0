"""Character propagation through the stratum-by-stratum construction."""

from fractions import Fraction
from functools import lru_cache

import pytest
from hypothesis import given, strategies as st

from toric_ih.charsys import Character, LocalSystemClass, descend, dual, is_trivial, is_twisted, pullback, restrict
from toric_ih.cli.builtins import CORPUS, builtin_fan
from toric_ih.errors import ParseError, PerversityUndefined, SupportTooDeep
from toric_ih.fan import codim_filtration, orbit_data
from toric_ih.icengine import (
    INCONCLUSIVE,
    INF,
    VANISHES,
    ComplexEntry,
    FanComplex,
    Perversity,
    deligne_ic,
    initial_complex,
    pushforward_step,
    replay_certificate,
    shift,
    truncate,
    twistedness_certificate,
    vanishing_verdict,
)
from toric_ih.lattice import smith_normal_form, diagonal
from toric_ih.toruscoh import torus_cohomology_koszul_oracle

F = Fraction
fan = lru_cache(maxsize=None)(builtin_fan)


def character_on(n, max_order=12, twisted=False):
    s = st.integers(1, max_order).flatmap(
        lambda m: st.lists(st.integers(0, m - 1), min_size=n, max_size=n).map(
            lambda v: Character(tuple(F(a, m) for a in v))
        )
    )
    return s.filter(lambda c: not is_trivial(c)) if twisted else s


def fan_and_character(twisted=False):
    return st.sampled_from(CORPUS).flatmap(
        lambda name: st.tuples(st.just(name), character_on(fan(name).ambient_rank, twisted=twisted))
    )


def strict_gm(n):
    """All strict GM perversities on codimensions 1..n."""
    out = [(0, 0)[:n]]
    for _ in range(2, n):
        out = [v + (v[-1] + step,) for v in out for step in (0, 1)]
    return [Perversity(v) for v in out]


def untruncated(f, chi):
    F_ = initial_complex(f, chi)
    for k in range(1, f.ambient_rank + 1):
        F_ = pushforward_step(F_, k)
    return F_


# -- perversities -------------------------------------------------------------


def test_perversity_presets():
    assert Perversity.preset("middle", 4).values == (0, 0, 0, 1)
    assert Perversity.preset("upper", 4).values == (0, 0, 1, 1)
    assert Perversity.preset("zero", 3).values == (0, 0, 0)
    assert Perversity.preset("top", 4).values == (0, 0, 1, 2)
    assert Perversity.preset("middle", 4).dual() == Perversity.preset("upper", 4)
    assert Perversity.preset("zero", 4).dual() == Perversity.preset("top", 4)


def test_perversity_parse_and_errors():
    p = Perversity.parse("p(1)=0, p(2)=0, p(3)=1", 3)
    assert p.values == (0, 0, 1) and str(p) == "p(1)=0,p(2)=0,p(3)=1"
    assert Perversity.parse(str(p), 3) == p
    with pytest.raises(PerversityUndefined):
        p(4)
    with pytest.raises(PerversityUndefined):
        Perversity.parse("p(1)=0", 2)
    with pytest.raises(PerversityUndefined):
        Perversity.parse("bogus", 2)
    with pytest.raises(ParseError):
        Perversity.parse("q(1)=0", 1)
    bad = Perversity((0, 1))
    assert not bad.is_strict_gm()
    with pytest.raises(PerversityUndefined):
        bad.dual()
    with pytest.raises(PerversityUndefined):
        deligne_ic(fan("affine:3"), Character((0, 0, 0)), Perversity((0, 0)))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_dual_of_strict_gm_is_strict_gm_and_involutive(n):
    for p in strict_gm(n):
        q = p.dual()
        assert q.is_strict_gm()
        assert q.dual() == p
        assert all(p(c) + q(c) == c - 2 for c in range(2, n + 1))


# -- building blocks ------------------------------------------------------------


def test_initial_complex_examples():
    f = fan("affine:2")
    (e,) = initial_complex(f, Character((F(1, 2), F(1, 3)))).entries
    assert e.cone == f.zero_cone and e.window == (-2, -2) and e.ranks == {-2: 1}
    assert e.character == Character((F(1, 2), F(1, 3))) and e.exact
    (e,) = initial_complex(fan("projective_space:1"), Character((F(1, 2),))).entries
    assert e.window == (-1, -1)
    (e,) = initial_complex(fan("p1xp1"), Character((0, 0))).entries
    assert not is_twisted(e.factors)


def test_shift_examples():
    F0 = initial_complex(fan("affine:2"), Character((F(1, 2), 0)))
    (e,) = shift(F0, 1).entries
    assert e.window == (-3, -3) and e.ranks == {-3: 1}
    assert shift(F0, 0) == F0
    assert shift(shift(F0, 3), -3) == F0


def _known_entry():
    f = fan("affine:2")
    tau = f.find([(1, 0), (0, 1)])
    q = orbit_data(f, tau).quotient
    return f, ComplexEntry(tau, -2, 0, LocalSystemClass(q, {Character(()): 2}), ((-2, 1), (-1, 2), (0, 1)), True)


def test_truncate_examples():
    f, e = _known_entry()
    F0 = FanComplex(f, (e,))
    (t,) = truncate(F0, -2).entries
    assert t.ranks == {-2: 1} and t.window == (-2, -2)
    hi = ComplexEntry(e.cone, -1, 3, e.factors, ((-1, 1),), False)
    assert truncate(FanComplex(f, (hi,)), -2).entries == ()
    assert truncate(F0, INF) == F0


def test_pushforward_one_trivial_restriction():
    f = fan("affine:2")
    F1 = pushforward_step(initial_complex(f, Character((0, F(1, 3)))), 1)
    (e,) = F1.entries_on(f.find([(1, 0)]))
    assert e.character == Character((F(1, 3),))
    assert e.window == (-2, -1) and e.ranks == {-2: 1, -1: 1} and e.exact
    assert F1.entries_on(f.find([(0, 1)])) == []
    # stalk ranks agree with H*(S^1) from the Koszul oracle, shifted by n
    oracle = torus_cohomology_koszul_oracle(1, Character((0,))).shifted(-2)
    assert oracle.nonzero() == e.ranks


def test_pushforward_both_restrictions_nontrivial():
    f = fan("affine:2")
    chi = Character((F(1, 2), F(1, 3)))
    F0 = initial_complex(f, chi)
    F1 = pushforward_step(F0, 1)
    assert F1.entries == F0.entries
    F2 = pushforward_step(F1, 2)
    assert F2.entries == F0.entries
    tau = f.find([(1, 0), (0, 1)])
    assert restrict(chi, orbit_data(f, tau).stab_lattice) == chi
    assert torus_cohomology_koszul_oracle(2, chi).nonzero() == {}


def test_pushforward_circle():
    f = fan("affine:1")
    F1 = pushforward_step(initial_complex(f, Character((0,))), 1)
    (e,) = F1.entries_on(f.find([(1,)]))
    assert e.ranks == {-1: 1, 0: 1} and e.exact and is_trivial(e.character)


def test_pushforward_rejects_deep_support():
    f = fan("affine:2")
    F1 = pushforward_step(initial_complex(f, Character((0, 0))), 1)
    with pytest.raises(SupportTooDeep):
        pushforward_step(F1, 1)


# -- the full construction ---------------------------------------------------------


def test_deligne_fully_twisted():
    f = fan("affine:2")
    G = deligne_ic(f, Character((F(1, 2), F(1, 3))), Perversity.preset("middle", 2))
    assert [e.cone for e in G.entries] == [f.zero_cone]
    assert twistedness_certificate(G).twisted


def test_deligne_one_trivial_restriction():
    f = fan("affine:2")
    G = deligne_ic(f, Character((0, F(1, 3))), Perversity.preset("middle", 2))
    assert G.support == {f.zero_cone.id, f.find([(1, 0)]).id}
    (e,) = G.entries_on(f.find([(1, 0)]))
    assert e.window == (-2, -2) and e.ranks == {-2: 1} and e.character == Character((F(1, 3),))


def test_deligne_constant_coefficients():
    f = fan("affine:2")
    G = deligne_ic(f, Character((0, 0)), Perversity.preset("middle", 2))
    for ray in codim_filtration(f)[1]:
        (e,) = G.entries_on(ray)
        assert e.ranks == {-2: 1} and e.window == (-2, -2) and is_trivial(e.character)
    (top,) = G.entries_on(f.find([(1, 0), (0, 1)]))
    assert not top.exact and top.degree_low <= -2 <= top.degree_high
    cert = twistedness_certificate(G)
    assert not cert.twisted
    assert {r.cone for r in cert.witnesses} >= {c.id for c in codim_filtration(f)[1]}


def test_empty_complex_is_twisted():
    assert twistedness_certificate(FanComplex(fan("affine:2"), ())).twisted


def test_verdict_examples():
    f = fan("affine:2")
    mid = Perversity.preset("middle", 2)
    assert vanishing_verdict(f, Character((F(1, 2), F(1, 3))), mid).verdict == VANISHES
    cert = vanishing_verdict(f, Character((0, 0)), mid)
    assert cert.verdict == INCONCLUSIVE
    assert any(f.cone(r.cone).dim == 1 for r in cert.primal.witnesses)


def test_weighted_projective_plane_by_hand():
    """P(1,1,2), chi = (1/2, 0): check each cone's restriction via SNF."""
    f = fan("weighted_p112")
    chi = Character((F(1, 2), 0))
    # the singular 2-cone spans an index-2 sublattice, saturation is Z^2
    _, d, _ = smith_normal_form(((1, 0), (-1, -2)))
    assert [abs(x) for x in diagonal(d)] == [1, 2]
    expected_restriction = {
        ((1, 0),): (F(1, 2),),
        ((0, 1),): (0,),
        ((-1, -2),): (F(1, 2),),
    }
    for gens, vals in expected_restriction.items():
        od = orbit_data(f, f.find(gens))
        assert restrict(chi, od.stab_lattice) == Character(vals)
    for tau in codim_filtration(f)[2]:
        assert restrict(chi, orbit_data(f, tau).stab_lattice) == chi
    # the only ray that receives a contribution carries 1/2 on Z^2/<(0,1)>
    ray = f.find([(0, 1)])
    assert not is_trivial(descend(chi, orbit_data(f, ray).quotient))
    G = deligne_ic(f, chi, Perversity.preset("middle", 2))
    assert G.support == {f.zero_cone.id, ray.id}
    cert = vanishing_verdict(f, chi, Perversity.preset("middle", 2))
    assert cert.verdict == VANISHES
    assert replay_certificate(f, cert) == (VANISHES, [])


# -- properties --------------------------------------------------------------------


@given(fan_and_character())
def test_single_step_matches_oracle(case):
    name, chi = case
    f = fan(name)
    n = f.ambient_rank
    for tau in f.cones:
        if tau.dim == 0:
            continue
        stalk = pushforward_step(initial_complex(f, chi), tau.dim).entries_on(tau)
        res = restrict(chi, orbit_data(f, tau).stab_lattice)
        oracle = torus_cohomology_koszul_oracle(tau.dim, res).shifted(-n)
        if not oracle.nonzero():
            assert stalk == []
            continue
        (e,) = stalk
        assert e.exact and e.ranks == oracle.nonzero()
        assert e.degree_low == min(oracle.nonzero())
        assert e.character == descend(chi, orbit_data(f, tau).quotient)


@given(fan_and_character(twisted=True))
def test_twisted_source_never_becomes_trivial(case):
    name, chi = case
    f = fan(name)
    G = untruncated(f, chi)
    for e in G.entries:
        assert not is_trivial(e.character)
        assert pullback(e.character, orbit_data(f, e.cone).quotient) == chi


@given(fan_and_character())
def test_exact_stalks_contained_in_propagation(case):
    name, chi = case
    f = fan(name)
    G = untruncated(f, chi)
    for tau in f.cones:
        exact = pushforward_step(initial_complex(f, chi), tau.dim).entries_on(tau) if tau.dim else \
            initial_complex(f, chi).entries
        have = {e.character for e in G.entries_on(tau)}
        assert {e.character for e in exact} <= have


@given(fan_and_character(), st.integers(-4, 4), st.integers(-5, 1))
def test_shift_and_truncate_stability(case, m, cutoff):
    name, chi = case
    f = fan(name)
    G = untruncated(f, chi)
    S = shift(G, m)
    assert [is_twisted(e.factors) for e in S.entries] == [is_twisted(e.factors) for e in G.entries]
    T = truncate(G, cutoff)
    assert {(e.cone.id, e.character) for e in T.entries} <= {(e.cone.id, e.character) for e in G.entries}
    kept = {(e.cone.id, e.character) for e in T.entries}
    for e in G.entries:
        if (e.cone.id, e.character) not in kept:
            assert e.degree_low > cutoff
    for e in T.entries:
        assert e.degree_high <= cutoff


@given(fan_and_character(), st.data())
def test_duality_swap(case, data):
    name, chi = case
    f = fan(name)
    p = data.draw(st.sampled_from(strict_gm(f.ambient_rank)))
    q = p.dual()
    assert (q.dual(), dual(dual(chi))) == (p, chi)
    a = vanishing_verdict(f, chi, p)
    b = vanishing_verdict(f, dual(chi), q)
    assert a.verdict == b.verdict
    assert a.verdict == (VANISHES if not is_trivial(chi) else INCONCLUSIVE)


@given(fan_and_character())
def test_certificates_replay(case):
    name, chi = case
    f = fan(name)
    cert = vanishing_verdict(f, chi, Perversity.preset("middle", f.ambient_rank))
    assert replay_certificate(f, cert) == (cert.verdict, [])


def test_tampered_certificate_is_caught():
    from dataclasses import replace

    f = fan("weighted_p112")
    cert = vanishing_verdict(f, Character((F(1, 2), 0)), Perversity.preset("middle", 2))
    rec = next(r for r in cert.primal.records if r.kind == "entry" and f.cone(r.cone).dim == 1)
    forged = replace(rec, character=Character((0,)), trivial=True)
    records = tuple(forged if r is rec else r for r in cert.primal.records)
    bad = replace(cert, primal=replace(cert.primal, records=records))
    verdict, problems = replay_certificate(f, bad)
    assert problems
    assert verdict == INCONCLUSIVE
