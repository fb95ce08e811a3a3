from pathlib import Path

import numpy as np
import pytest

from crnaccess import (Generator, NoConvergence, SingularMatrix, StateSpace,
                       SystemParams, build_basic_generator,
                       build_reservation_generator, enumerate_basic,
                       enumerate_reservation, export_pi_csv, solve_direct,
                       solve_uniformization)
from crnaccess.generator import Event
from crnaccess.solver import balance_residual

from conftest import PAPER

DATA = Path(__file__).parent / "data"


def birth_death_generator(lam, mu):
    space = StateSpace([(0,), (1,)])
    gen = Generator(space)
    gen.add(0, 1, Event.PU_ARRIVAL_IDLE, lam)
    gen.add(1, 0, Event.PU_DEPARTURE, mu)
    return gen


def test_two_state_closed_form_both_methods():
    lam, mu = 0.35, 1.2
    gen = birth_death_generator(lam, mu)
    expected = np.array([mu / (lam + mu), lam / (lam + mu)])
    for solve in (solve_direct, solve_uniformization):
        dist = solve(gen)
        assert np.abs(dist.pi - expected).max() <= 1e-10


def test_single_state_chain():
    space = StateSpace([(0,)])
    gen = Generator(space)
    for solve in (solve_direct, solve_uniformization):
        dist = solve(gen)
        assert dist.pi.tolist() == [1.0]
        assert dist.residual_inf == 0.0


def test_pu_only_on_off_chain():
    # basic chain with no SU traffic and a single PU is a 2-state on/off
    p = SystemParams(M=1, k=1, lambda_p=0.4, mu_p=1.1, lambda_s=0.0, mu_s=1.0)
    space = enumerate_basic(p)
    dist = solve_direct(build_basic_generator(p, space))
    lookup = {tuple(s): prob for s, prob in zip(space, dist.pi)}
    assert lookup[(0, 0, 0)] == pytest.approx(1.1 / 1.5, abs=1e-12)
    assert lookup[(1, 0, 0)] == pytest.approx(0.4 / 1.5, abs=1e-12)


@pytest.mark.parametrize("model", ["basic", "reservation"])
def test_paper_chain_methods_agree(model):
    if model == "basic":
        space = enumerate_basic(PAPER)
        gen = build_basic_generator(PAPER, space)
    else:
        space = enumerate_reservation(PAPER)
        gen = build_reservation_generator(PAPER, space)
    direct = solve_direct(gen, tol=1e-10)
    uniform = solve_uniformization(gen)
    assert direct.residual_inf <= 1e-10
    assert uniform.residual_inf <= 1e-10
    assert np.abs(direct.pi - uniform.pi).max() <= 1e-8
    assert abs(direct.pi.sum() - 1.0) <= 1e-12
    assert direct.pi.min() >= 0.0


@pytest.mark.parametrize("model", ["basic", "reservation"])
def test_paper_pi_matches_golden(model):
    # frozen after cross-method agreement; guards against solver regressions
    if model == "basic":
        space = enumerate_basic(PAPER)
        gen = build_basic_generator(PAPER, space)
    else:
        space = enumerate_reservation(PAPER)
        gen = build_reservation_generator(PAPER, space)
    dist = solve_direct(gen)
    golden = {}
    lines = (DATA / f"pi_{model}_paper.csv").read_text().splitlines()[1:]
    for line in lines:
        state, prob = line.rsplit(",", 1)
        golden[state.strip('"')] = float(prob)
    assert len(golden) == len(space)
    for s, prob in zip(space, dist.pi):
        assert prob == pytest.approx(golden[str(tuple(s))], abs=1e-12)


def test_global_balance_spot_check():
    space = enumerate_reservation(PAPER)
    gen = build_reservation_generator(PAPER, space)
    dist = solve_direct(gen)
    rng = np.random.RandomState(20260811)
    for idx in rng.choice(len(space), size=20, replace=False):
        assert balance_residual(gen, dist.pi, int(idx)) <= 1e-10


def test_reducible_chain_raises_singular():
    space = StateSpace([(0,), (1,), (2,), (3,)])
    gen = Generator(space)
    gen.add(0, 1, Event.PU_ARRIVAL_IDLE, 1.0)
    gen.add(1, 0, Event.PU_DEPARTURE, 1.0)
    gen.add(2, 3, Event.PU_ARRIVAL_IDLE, 1.0)
    gen.add(3, 2, Event.PU_DEPARTURE, 1.0)
    assert not gen.is_irreducible()
    with pytest.raises(SingularMatrix):
        solve_direct(gen)


def test_uniformization_no_convergence():
    gen = birth_death_generator(0.9, 0.1)
    with pytest.raises(NoConvergence):
        solve_uniformization(gen, tol=1e-15, max_iters=2)


def test_pi_export_format():
    gen = birth_death_generator(1.0, 2.0)
    dist = solve_direct(gen)
    text = export_pi_csv(gen.space, dist.pi)
    lines = text.splitlines()
    assert lines[0] == "state_tuple,probability"
    assert lines[1] == '"(0,)",0.66666666666666663'
    assert lines[2] == '"(1,)",0.33333333333333331'
    # probabilities round-trip through the 17-digit format
    assert float(lines[1].rsplit(",", 1)[1]) == dist.pi[0]
