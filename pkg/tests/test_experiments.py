import pickle

import numpy as np
import pytest

from affectgrid.config import (
    SCENARIO_DIR,
    ConfigError,
    InfeasiblePlacement,
    ProfileSpec,
    ScenarioConfig,
    builtin_scenarios,
    dump_scenario,
    get_scenario,
    load_scenario,
)
from affectgrid.experiments import LengthMismatch, aggregate, init_world, run_replicates, run_simulation
from affectgrid.model import EMOTIONS, POSITIVE, Emotion, check_occupancy
from affectgrid.perception import write_confusion_matrix, synthesize_confusion_matrix
from affectgrid.seeding import derive_seed, make_rng, mix64


def small(name="exp1-kdef", **kw):
    return get_scenario(name).replace(**{"replicates": 3, "steps": 20, **kw})


def test_mix64_known_values():
    # SplitMix64 reference output for state 0 after one increment
    assert mix64(0) == 0xE220A8397B1DCDAF
    assert derive_seed(0, "run", 1) != derive_seed(0, "run", 2)
    assert derive_seed(5, "table", "kdef") == derive_seed(5, "table", "kdef")


def test_init_world_forty_on_nine_by_nine():
    w = init_world(get_scenario("exp1-kdef"), make_rng(0, "x"))
    assert len(w.agents) == 40 and len(w.grid.cells) == 40
    assert len({a.pos for a in w.agents}) == 40
    check_occupancy(w.grid, w.agents)
    assert [a.identity for a in w.agents] == list(range(40))
    assert all(a.trust == 1.0 and not a.history for a in w.agents)


def test_init_world_full_and_overfull():
    full = ScenarioConfig("full", (("kdef", 81),))
    assert len(init_world(full, make_rng(0)).grid.cells) == 81
    with pytest.raises(InfeasiblePlacement):
        init_world(ScenarioConfig("over", (("kdef", 82),)), make_rng(0))


def test_init_emotion_modes():
    fixed = ScenarioConfig("f", initial_emotions="fixed", initial_emotion=Emotion.FEAR)
    assert all(a.emotion is Emotion.FEAR for a in init_world(fixed, make_rng(0)).agents)
    exp3 = get_scenario("exp3-kdef")
    assert all(a.emotion in POSITIVE for a in init_world(exp3, make_rng(0)).agents)


def test_groups_follow_composition():
    w = init_world(get_scenario("exp2-balanced"), make_rng(0))
    assert [a.group for a in w.agents] == ["kdef"] * 13 + ["ck+"] * 14 + ["jaffe"] * 13


def test_identity_profile_pins_trust():
    cfg = small(profiles=(("kdef", ProfileSpec(accuracy=1.0, bias=0.5)),))
    res = run_simulation(cfg, 0)
    assert all(r.means["kdef"] == 1.0 for r in res.trust)


def test_zero_steps():
    res = run_simulation(small(steps=0), 0)
    assert len(res.census) == len(res.trust) == len(res.positive) == 1


def test_run_lengths_and_census():
    res = run_simulation(small(), 1)
    assert len(res.census) == 21
    assert all(c.total == 40 for c in res.census)
    assert [c.step for c in res.census] == list(range(21))


def test_run_is_deterministic():
    a = run_simulation(small("exp2-skewed"), 4)
    b = run_simulation(small("exp2-skewed"), 4)
    assert pickle.dumps((a.census, a.trust, a.positive)) == pickle.dumps((b.census, b.trust, b.positive))
    assert [x.pos for x in a.final.agents] == [x.pos for x in b.final.agents]


def test_replicates_count_and_order():
    cfg = small(replicates=10, steps=5)
    res = run_replicates(cfg)
    assert [r.run_index for r in res] == list(range(10))
    single = run_replicates(cfg.replace(replicates=1))[0]
    ref = run_simulation(cfg, 0)
    assert single.census == ref.census and single.trust == ref.trust


def test_parallel_matches_sequential():
    cfg = small("exp3-skewed", replicates=4, steps=15)
    seq = aggregate(run_replicates(cfg, parallel=1))
    par = aggregate(run_replicates(cfg, parallel=2))
    assert np.array_equal(seq.census, par.census)
    assert seq.trust == par.trust and seq.positive == par.positive and seq.clusters == par.clusters


def test_execution_order_does_not_matter():
    cfg = small(replicates=4, steps=10)
    fwd = [run_simulation(cfg, i) for i in range(4)]
    rev = [run_simulation(cfg, i) for i in reversed(range(4))]
    a, b = aggregate(fwd), aggregate(sorted(rev, key=lambda r: r.run_index))
    assert np.array_equal(a.census, b.census) and a.trust == b.trust


def test_aggregate_single_and_identical():
    r = run_simulation(small(), 0)
    agg = aggregate([r])
    assert np.array_equal(agg.census, np.array([c.as_row() for c in r.census], dtype=float))
    assert agg.positive == r.positive
    twice = aggregate([r, r])
    assert np.array_equal(twice.census, agg.census) and twice.trust == agg.trust


def test_aggregate_hand_means():
    rs = run_replicates(small("exp2-balanced", replicates=3))
    agg = aggregate(rs)
    sad = Emotion.SAD.index
    for t in (0, 7, 20):
        assert agg.census[t, sad] == pytest.approx(sum(r.census[t].counts[Emotion.SAD] for r in rs) / 3)
        assert agg.trust["ck+"][t] == pytest.approx(sum(r.trust[t].means["ck+"] for r in rs) / 3)


def test_aggregate_two_run_mean():
    rs = run_replicates(small(replicates=2, steps=0))
    for r, sad in zip(rs, (30, 40)):
        r.census[0].counts.update({e: 0 for e in EMOTIONS})
        r.census[0].counts[Emotion.SAD] = sad
    assert aggregate(rs).census[0, Emotion.SAD.index] == 35


def test_aggregate_length_mismatch():
    a = run_simulation(small(steps=3), 0)
    b = run_simulation(small(steps=4), 0)
    with pytest.raises(LengthMismatch):
        aggregate([a, b])
    with pytest.raises(LengthMismatch):
        aggregate([])


def test_builtins():
    cfgs = {c.name: c for c in builtin_scenarios()}
    assert len(cfgs) == 11
    assert cfgs["exp1-kdef"].composition == (("kdef", 40),) and cfgs["exp1-kdef"].shocks is None
    assert cfgs["exp2-balanced"].composition == (("kdef", 13), ("ck+", 14), ("jaffe", 13))
    dom = cfgs["exp3-dominant"]
    assert dom.composition == (("kdef", 24), ("ck+", 8), ("jaffe", 8))
    assert dom.shocks.period == 10 and dom.shocks.fraction == 0.2
    assert sum(c.shocks is not None for c in cfgs.values()) == 5
    for c in cfgs.values():
        assert (c.width, c.height, c.steps, c.replicates, c.n_agents) == (9, 9, 100, 10, 40)
        p = c.params
        assert (p.alpha, p.tau_valence, p.tau_sad, p.tau_contagion, p.history_len) == (0.1, -1, 0.3, 0.7, 5)


def test_shipped_files_match_builtins():
    for cfg in builtin_scenarios():
        path = SCENARIO_DIR / f"{cfg.name}.toml"
        assert path.read_text() == dump_scenario(cfg)
        assert load_scenario(path) == cfg


def test_config_roundtrip_with_matrix(tmp_path):
    m = synthesize_confusion_matrix(0.5, 0.5, label="mine")
    write_confusion_matrix(m, tmp_path / "mine.csv")
    text = dump_scenario(ScenarioConfig("custom", (("mine", 10),)))
    text += '\n[profiles.mine]\nmatrix = "mine.csv"\n'
    (tmp_path / "c.toml").write_text(text)
    cfg = load_scenario(tmp_path / "c.toml")
    assert cfg.profile("mine").matrix == tmp_path / "mine.csv"
    res = run_simulation(cfg.replace(steps=3), 0)
    assert res.final.matrices["mine"].accuracy == pytest.approx(0.5)


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        get_scenario("no-such-scenario")
    bad = tmp_path / "bad.toml"
    bad.write_text('name = "x"\n[[composition]]\nprofile = "kdef"\ncount = 4\n[params]\nalpha = 3.0\n')
    with pytest.raises(ConfigError):
        load_scenario(bad)
    bad.write_text('name = "x"\nbogus = 1\n[[composition]]\nprofile = "kdef"\ncount = 4\n')
    with pytest.raises(ConfigError):
        load_scenario(bad)
    bad.write_text("name = [")
    with pytest.raises(ConfigError):
        load_scenario(bad)
    with pytest.raises(ConfigError):
        ScenarioConfig("x", (("nobody", 3),)).profile("nobody").build("nobody")
