import numpy as np
import pytest
from scipy import stats

from _oracles import expected_first_marked, expected_uniform_k1_run
from algevo.evolve import (
    CONVERGED,
    EXTINCT,
    IMPROVED,
    CandidatePool,
    EvolutionConfig,
    EvolutionTrace,
    Strategy,
    build_distribution,
    evolve_instance,
    evolve_run,
    flip_sets,
    hamming,
)
from algevo.graphs import named_target, random_matrix
from algevo.rng import make_rng


def test_one_bit_away_expectation():
    cfg = EvolutionConfig()
    m = np.zeros((8, 8), dtype=np.uint8)
    target = m.copy()
    target[2, 6] = 1
    rng = make_rng(2024)
    steps = [evolve_instance(m, target, cfg, rng=rng).steps for _ in range(3000)]
    se = np.std(steps, ddof=1) / np.sqrt(len(steps))
    assert expected_first_marked(64, 1) == 32.5
    assert abs(np.mean(steps) - 32.5) < 4 * se


def test_instance_outcomes():
    cfg = EvolutionConfig()
    m = np.zeros((4, 4), dtype=np.uint8)
    t = m.copy()
    t[0, 0] = t[1, 1] = 1
    res = evolve_instance(m, t, cfg, rng=make_rng(0))
    assert res.outcome == IMPROVED and res.fitness == 1
    assert hamming(res.matrix, t) == 1
    res2 = evolve_instance(res.matrix, t, cfg, rng=make_rng(0))
    assert res2.outcome == CONVERGED and res2.fitness == 0


def test_alpha_converges_early():
    m = np.zeros((4, 4), dtype=np.uint8)
    t = m.copy()
    t[0, :3] = 1
    tr = evolve_run(m, t, EvolutionConfig(alpha=1), rng=make_rng(1))
    assert tr.converged and hamming(tr.matrices[-1], t) == 1
    assert len(tr.instances) == 2


def test_precondition():
    m = np.zeros((8, 8), dtype=np.uint8)
    with pytest.raises(ValueError):
        evolve_instance(m, m, EvolutionConfig())
    with pytest.raises(ValueError):
        evolve_instance(m, np.zeros((4, 4), dtype=np.uint8), EvolutionConfig())


def test_parity_extinction_k3():
    m = np.zeros((8, 8), dtype=np.uint8)
    t = m.copy()
    t[4, 4] = 1
    # exhaustive: no exact-3 flip brings the distance below 1
    flips = flip_sets(8, 3)
    dist = 1 + np.where(flips == 36, -1, 1).sum(axis=1)
    assert len(flips) == 41664 and dist.min() >= 2
    res = evolve_instance(m, t, EvolutionConfig(shifts=3), rng=make_rng(3))
    assert res.outcome == EXTINCT and res.steps == 2500 and res.matrix is None


def test_pool_exhaustion_counts_as_extinct():
    m = np.zeros((8, 8), dtype=np.uint8)
    t = m.copy()
    t[0, 0] = 1
    res = evolve_instance(m, t, EvolutionConfig(shifts=2), rng=make_rng(4))
    assert res.outcome == EXTINCT and res.steps == 2016


def test_with_replacement_extinction_uses_threshold():
    m = np.zeros((8, 8), dtype=np.uint8)
    t = m.copy()
    t[0, 0] = 1
    res = evolve_instance(m, t, EvolutionConfig(shifts=2, replacement=True, extinction_threshold=300),
                          rng=make_rng(4))
    assert res.outcome == EXTINCT and res.steps == 300


def test_no_repeats_within_instance_but_across(table32):
    m = random_matrix(make_rng(5), 8)
    t = named_target("complete8")
    tr = evolve_run(m, t, EvolutionConfig(strategy="bdm"), table32, record=True)
    seen_any_repeat = False
    prev = set()
    for inst in tr.instances:
        keys = [c.tobytes() for c in inst.drawn]
        assert len(keys) == len(set(keys))
        assert len(keys) == inst.steps
        seen_any_repeat |= bool(prev & set(keys))
        prev = set(keys)
    assert tr.converged


def test_trace_properties(table32):
    m = random_matrix(make_rng(6), 8)
    t = named_target("star8")
    tr = evolve_run(m, t, EvolutionConfig(strategy="bdm"), table32)
    fits = [r.fitness for r in tr.instances]
    assert all(a > b for a, b in zip(fits, fits[1:]))
    assert tr.total_steps == sum(r.steps for r in tr.instances)
    assert tr.terminal == CONVERGED and fits[-1] == 0
    assert all(r.outcome == IMPROVED for r in tr.instances[:-1])


def test_trace_determinism_and_round_trip(table32):
    m = random_matrix(make_rng(7), 8)
    t = named_target("complete8")
    cfg = EvolutionConfig(strategy="local_bdm", seed=42)
    a = evolve_run(m, t, cfg, table32).to_json()
    b = evolve_run(m, t, cfg, table32).to_json()
    assert a == b
    back = EvolutionTrace.from_json(a)
    assert back.to_json() == a
    assert back.config == cfg


def test_already_at_target_is_converged_without_instances():
    t = named_target("grid2x4")
    tr = evolve_run(t, t, EvolutionConfig())
    assert tr.converged and tr.total_steps == 0 and tr.instances == []


def test_run_extinct_terminal():
    m = np.zeros((8, 8), dtype=np.uint8)
    t = m.copy()
    t[0, :3] = 1
    tr = evolve_run(m, t, EvolutionConfig(shifts=2))
    assert tr.terminal == EXTINCT and not tr.converged


def test_uniform_complete_graph_matches_analytic_mean():
    t = named_target("complete8")
    cfg = EvolutionConfig()
    steps = [evolve_run(random_matrix(make_rng(11, i), 8), t, EvolutionConfig(seed=i)).total_steps
             for i in range(200)]
    expect = expected_uniform_k1_run(64)
    se = np.std(steps, ddof=1) / np.sqrt(len(steps))
    assert 199 < expect < 201
    assert abs(np.mean(steps) - expect) < 3 * se
    assert cfg.extinction_threshold == 2500


def test_planted_low_complexity_block_is_retained(table32):
    # fraction of draws keeping a zero 2x2 block: BDM above uniform's 60/64
    fracs = {}
    for kind in ("uniform", "bdm"):
        out = []
        for i in range(50):
            r = make_rng(3, i)
            m = (r.random((8, 8)) < 0.5).astype(np.uint8)
            m[0:2, 0:2] = 0
            d = build_distribution(m, EvolutionConfig(strategy=kind), table32)
            pool = CandidatePool(d, make_rng(4, i), replacement=True)
            idx = [pool.draw() for _ in range(200)]
            inside = np.isin(d.flips[idx, 0], [0, 1, 8, 9])
            out.append(1 - inside.mean())
        fracs[kind] = np.array(out)
    assert fracs["bdm"].mean() > fracs["uniform"].mean()
    assert stats.wilcoxon(fracs["bdm"], fracs["uniform"], alternative="greater").pvalue < 0.05


def test_config_validation():
    with pytest.raises(ValueError):
        EvolutionConfig(shifts=0)
    with pytest.raises(ValueError):
        EvolutionConfig(extinction_threshold=0)
    with pytest.raises(ValueError):
        EvolutionConfig(alpha=-1)
    with pytest.raises(ValueError):
        Strategy("nope")
    with pytest.raises(ValueError):
        Strategy("entropy_linear", epsilon=0)
    with pytest.raises(ValueError):
        EvolutionConfig(shifts=65).check_size(8)
    with pytest.raises(ValueError):
        EvolutionConfig(strategy="local_bdm").check_size(6)
    assert EvolutionConfig(strategy="bdm").strategy == Strategy("bdm")
    assert EvolutionConfig.from_dict(EvolutionConfig(seed=3).to_dict()) == EvolutionConfig(seed=3)
