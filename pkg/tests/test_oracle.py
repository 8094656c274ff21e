import random

import pytest
from hypothesis import given, strategies as st

from posetmod.field import QQ
from posetmod.generators import random_module, random_poset
from posetmod.module import ModuleMorphism, indicator_module
from posetmod.oracle import CapExceeded, OracleReport, find_isomorphism, hom_space, oracle_hom
from posetmod.poset import FinitePoset, pi0

seeds = st.integers(0, 10 ** 6)


@given(seeds)
def test_endomorphisms_of_constant_module_count_components(seed):
    p = random_poset(6, seed)
    whole = p.region(list(p.elements), "set")
    assert oracle_hom(indicator_module(whole), indicator_module(whole)) == len(pi0(whole))


@given(seeds)
def test_basis_elements_are_morphisms(seed):
    p = random_poset(5, seed)
    m, n = random_module(p, seed), random_module(p, seed + 1)
    for phi in hom_space(m, n):
        ModuleMorphism(phi.source, phi.target, phi.comps, check=True)


@given(seeds)
def test_isomorphism_found_after_base_change(seed):
    p = random_poset(5, seed)
    m = random_module(p, seed)
    rng = random.Random(seed)
    # conjugate by random invertible diagonal scalings
    scale = [QQ(rng.choice([1, 2, -3])) for _ in p.elements]
    maps = {(i, j): QQ.scale(scale[j] / scale[i], a) for (i, j), a in m.maps.items()}
    from posetmod.module import EncodedModule
    n = EncodedModule(p, m.dims, maps, QQ)
    assert find_isomorphism(m, n, seed) is not None


def test_chain_hom_counts():
    chain = FinitePoset(range(3), [[i <= j for j in range(3)] for i in range(3)])
    low = indicator_module(chain.region([0], "downset"))
    top = indicator_module(chain.region([2], "upset"))
    whole = indicator_module(chain.region([0, 1, 2], "set"))
    assert oracle_hom(whole, low) == 1 and oracle_hom(low, whole) == 0
    assert oracle_hom(top, whole) == 1 and oracle_hom(whole, top) == 0


def test_cap():
    p = random_poset(6, 0)
    m = random_module(p, 0)
    with pytest.raises(CapExceeded):
        oracle_hom(m, m, cap=0 if sum(m.dims) else -1)


def test_report_line():
    assert OracleReport("hom", 3, True).line() == "PASS hom seed=3"
    assert OracleReport("hom", 3, False, (1, 2)).line() == "FAIL hom seed=3 witness=(1, 2)"
