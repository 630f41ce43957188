import itertools
import json
import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from diamondfold.chain import CHOICES, ConformationCode, RealizeOptions, realize, self_avoiding
from diamondfold.folding import (
    ContactRule, InitializationError, InvalidConformationError, Schedule,
    SearchTooLargeError, anneal_fold, class_model, code_space_size, contact_set,
    dilated_hull_volume, energy, enumerate_conformations, exhaustive_fold, hp_model,
    load_model, packing_fraction_analytic, packing_fraction_chain, parse_model, union_volume_mc,
)

from oracles import brute_minima, brute_self_avoiding_count, ca_contacts

# ---------------------------------------------------------------- models


def test_hp_model():
    m = hp_model()
    assert m.pair("H", "H") == -1.0 and m.pair("H", "P") == 0.0 and m.pair("P", "H") == 0.0
    with pytest.raises(KeyError):
        m.pair("H", "X")


def test_class_model_aliases():
    m = class_model()
    assert m.pair("Val", "Leu") == -2.0
    assert m.pair("V", "GLY") == -1.5
    assert m.pair("Gly", "Ala") == -1.0


def test_parse_model_round_trip(tmp_path):
    m = parse_model("# demo\nH H -1.5\nH P 0  # inline\nalias A H\nmin_separation 3\n")
    assert m.pair("A", "H") == -1.5 and m.rule.min_separation == 3
    again = parse_model(m.dumps())
    assert again.pair_energies == m.pair_energies and again.alias == m.alias
    p = tmp_path / "m.txt"
    p.write_text(m.dumps())
    assert load_model(str(p)).pair_energies == m.pair_energies
    assert load_model("hp").name == "hp"


@pytest.mark.parametrize("text", ["H H -1\nH P x\n", "H H -1\nH H -2\n", "H\n", "", "H H inf\n"])
def test_parse_model_errors(text):
    with pytest.raises(ValueError):
        parse_model(text)


def test_parse_model_error_has_line_number():
    with pytest.raises(ValueError, match="line 2"):
        parse_model("H H -1\nH P zero\n")


def test_scaled():
    assert hp_model().scaled(3).pair("H", "H") == -3.0


# --------------------------------------------------------------- contacts

pair = st.tuples(st.sampled_from(CHOICES), st.sampled_from(CHOICES))


@st.composite
def codes(draw, n_min=3, n_max=9):
    n = draw(st.integers(n_min, n_max))
    return ConformationCode.from_dofs(draw(st.lists(pair, min_size=n - 1, max_size=n - 1)), "H" * n)


@given(codes())
def test_contact_set_matches_oracle(code):
    ch = realize(code)
    assert contact_set(ch) == ca_contacts(ch)
    assert contact_set(ch, ContactRule(4)) == ca_contacts(ch, 4)
    for i, j in contact_set(ch):
        assert (j - i) % 2 == 1 and j - i >= 3  # bipartite lattice


def test_energy_rejects_collision():
    bad = next(c for c in (ConformationCode.from_dofs(d, "HHHHH")
                           for d in itertools.product(itertools.product(CHOICES, CHOICES), repeat=4))
               if not self_avoiding(realize(c)))
    with pytest.raises(InvalidConformationError):
        energy(realize(bad), hp_model())


# ------------------------------------------------------------ enumeration


@pytest.mark.parametrize("n", [3, 4, 5])
def test_enumeration_matches_brute_force(n):
    total, good = brute_self_avoiding_count(n)
    assert total == code_space_size(n)
    assert len(enumerate_conformations(n)) == good


def test_enumeration_cis_matches_brute_force():
    total, good = brute_self_avoiding_count(4, cis=True)
    assert total == code_space_size(4, cis=True) == 18 ** 3
    assert len(enumerate_conformations(4, cis=True)) == good


def test_enumeration_backbone_only_n5():
    opts = RealizeOptions(side_chains=False)
    assert len(enumerate_conformations(5, (True,) * 5, opts=opts)) == \
        brute_self_avoiding_count(5, opts=opts)[1]


def test_enumeration_frozen_counts():
    # DFS counts cross-checked against brute force when first computed
    assert len(enumerate_conformations(5)) == 6545
    assert len(enumerate_conformations(5, cis=True)) == 68670
    assert len(enumerate_conformations(6)) == 58465


def test_enumeration_contacts_and_order():
    confs = enumerate_conformations(6)
    assert [c.dofs for c in confs] == sorted(c.dofs for c in confs)
    for c in confs[::997]:
        ch = realize(ConformationCode.from_dofs(c.dofs, "X" * 6, c.omegas))
        assert self_avoiding(ch)
        assert list(c.contacts) == sorted(ca_contacts(ch), key=lambda p: (p[1], p[0]))


def test_enumeration_parallel_identical():
    enumerate_conformations.cache_clear()
    serial = enumerate_conformations(5, workers=1)
    par = enumerate_conformations(5, workers=2)
    assert serial == par


# ------------------------------------------------------------- exhaustive


def _hp_pair(a, b):
    return -1.0 if a == b == "H" else 0.0


def test_exhaustive_matches_brute_minima_n6():
    rng = random.Random(5)
    seqs = ["".join(rng.choice("HP") for _ in range(6)) for _ in range(6)] + ["HHHHHH"]
    best, count = brute_minima(seqs, _hp_pair, 6)
    for s, b, c in zip(seqs, best, count):
        rep = exhaustive_fold(s, hp_model())
        assert (rep.best_energy, rep.n_optimal) == (b, c)
        for code in rep.codes[:20]:
            assert energy(realize(code), hp_model()) == b


def test_exhaustive_all_h_n6_has_contacts():
    rep = exhaustive_fold("HHHHHH", hp_model())
    assert rep.best_energy < 0
    assert rep.self_avoiding == 58465 and rep.states_examined == 9 ** 5


def test_exhaustive_too_large():
    with pytest.raises(SearchTooLargeError):
        exhaustive_fold("H" * 9, hp_model())


def test_exhaustive_max_codes():
    rep = exhaustive_fold("PPPPP", hp_model(), max_codes=10)
    assert rep.best_energy == 0 and len(rep.codes) == 10 and rep.n_optimal == 6545
    assert json.loads(rep.to_json())["n_optimal"] == 6545


def test_exhaustive_class_model_glycine():
    rep = exhaustive_fold(["Gly", "Val", "Gly", "Leu", "Gly"], class_model())
    assert rep.self_avoiding == len(enumerate_conformations(5, (True, False, True, False, True)))


# ---------------------------------------------------------------- anneal


def test_schedule():
    s = Schedule(2.0, 0.05, 101)
    assert s.temperature(0) == 2.0
    assert s.temperature(100) == pytest.approx(0.05)
    assert s.temperature(50) == pytest.approx(math.sqrt(0.1))
    assert Schedule(1.0, 0.0, 11).temperature(10) == 0.0
    for bad in [(-1, 1, 10), (1, 1, 0)]:
        with pytest.raises(ValueError):
            Schedule(*bad)


def test_anneal_deterministic_and_valid():
    a = anneal_fold("HPHHPHH", hp_model(), Schedule(steps=2000), seed=11, record_every=100)
    b = anneal_fold("HPHHPHH", hp_model(), Schedule(steps=2000), seed=11, record_every=100)
    assert a.to_json() == b.to_json() and a.trajectory == b.trajectory
    assert len(a.trajectory) == 20
    assert a.trajectory_csv().splitlines()[0] == "step,energy,temperature"
    ex = exhaustive_fold("HPHHPHH", hp_model())
    assert a.best_energy >= ex.best_energy
    for code in a.codes:
        assert energy(realize(code), hp_model()) == a.best_energy


def test_anneal_with_cis_moves():
    rep = anneal_fold("HHPHH", hp_model(), Schedule(steps=1500), seed=2, allow_cis=True)
    assert rep.best_energy >= exhaustive_fold("HHPHH", hp_model(), cis=True).best_energy


def test_anneal_zero_temperature_is_greedy():
    rep = anneal_fold("HHHHHH", hp_model(), Schedule(0.0, 0.0, 500), seed=1)
    assert rep.best_energy <= 0


def test_anneal_bad_initial():
    bad = next(c for c in (ConformationCode.from_dofs(d, "HHHHH")
                           for d in itertools.product(itertools.product(CHOICES, CHOICES), repeat=4))
               if not self_avoiding(realize(c)))
    with pytest.raises(InitializationError):
        anneal_fold("HHHHH", hp_model(), initial=bad)


# --------------------------------------------------------------- packing


def test_packing_analytic():
    assert packing_fraction_analytic("diamond") == pytest.approx(0.3401, abs=5e-5)
    assert packing_fraction_analytic("fcc") == pytest.approx(0.7405, abs=5e-5)
    assert packing_fraction_analytic("diamond") == math.pi * math.sqrt(3) / 16
    with pytest.raises(ValueError):
        packing_fraction_analytic("bcc")


def test_hull_cube_steiner():
    cube = np.array(list(itertools.product([0, 1], repeat=3)), float)
    r = 0.3
    want = 1 + 6 * r + 3 * math.pi * r ** 2 + 4 / 3 * math.pi * r ** 3
    vol, flag = dilated_hull_volume(cube, r)
    assert flag is None and vol == pytest.approx(want, rel=1e-12)


def test_hull_degenerate_cases():
    r = 0.5
    ball = 4 / 3 * math.pi * r ** 3
    assert dilated_hull_volume(np.zeros((2, 3)), r) == (pytest.approx(ball), "point")
    seg = np.array([[0, 0, 0], [2.0, 0, 0]])
    assert dilated_hull_volume(seg, r) == (pytest.approx(math.pi * r * r * 2 + ball), "capsule")
    sq = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], float)
    want = 2 * r + math.pi / 2 * 4 * r * r + ball
    assert dilated_hull_volume(sq, r) == (pytest.approx(want), "planar")


def test_union_mc_single_sphere():
    rng = np.random.default_rng(0)
    vol, se, box = union_volume_mc(np.zeros((1, 3)), np.array([1.0]), 400_000, rng)
    assert abs(vol - 4 / 3 * math.pi) < 4 * se
    assert box == pytest.approx(8.0)


def test_union_mc_stderr_scaling():
    c = np.array([[0, 0, 0], [1.2, 0, 0]], float)
    r = np.array([1.0, 0.7])
    se1 = union_volume_mc(c, r, 50_000, np.random.default_rng(1))[1]
    se2 = union_volume_mc(c, r, 100_000, np.random.default_rng(1))[1]
    assert se1 / se2 == pytest.approx(math.sqrt(2), rel=0.05)


def test_compact_packs_denser_than_extended():
    seq = ["Val"] * 16
    ext = packing_fraction_chain(realize(ConformationCode.extended(seq)), mc_samples=400_000, seed=3)
    helix = realize(ConformationCode.from_dofs([(1, 1)] * 15, seq))
    cmp_ = packing_fraction_chain(helix, mc_samples=400_000, seed=3)
    assert cmp_.fraction - ext.fraction > 3 * math.hypot(cmp_.stderr, ext.stderr)
    assert 0 < ext.fraction < cmp_.fraction < packing_fraction_analytic("fcc")


def test_packing_monotone_in_radius():
    ch = realize(ConformationCode.from_dofs([(1, 2), (2, 1), (1, 1), (3, 2), (2, 2)], ["Leu"] * 6))
    fr = [packing_fraction_chain(ch, {"I": r, "II": r}, mc_samples=60_000, seed=4,
                                 region_radius=1.0).fraction for r in (0.4, 0.6, 0.8, 1.0)]
    assert fr == sorted(fr)


def test_packing_rejects_bad_radius():
    ch = realize(ConformationCode.extended(["Val"] * 3))
    with pytest.raises(ValueError):
        packing_fraction_chain(ch, {"I": 0.0, "II": 0.5})


# ------------------------------------------------------------ frozen oracle


@pytest.mark.slow
def test_hp7_frozen_oracle(data_dir):
    data = json.loads((data_dir / "hp7_oracle.json").read_text())
    assert len(data["instances"]) == 20
    for inst in data["instances"]:
        rep = exhaustive_fold(inst["sequence"], hp_model())
        assert rep.best_energy == inst["min_energy"]
        assert rep.n_optimal == inst["n_optimal"]
