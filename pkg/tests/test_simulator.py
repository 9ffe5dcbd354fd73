import math

import numpy as np
import pytest

from ltgf.analytic import failure_rate
from ltgf.simulator import (
    COLUMNS,
    DEFAULT_EPSILONS,
    ConfigError,
    Distribution,
    ExperimentConfig,
    ResultRow,
    Slice,
    analytic_rows,
    epsilon_grid,
    parse_distributions,
    read_csv,
    run_experiment,
    run_trial,
    trial_rng,
    write_csv,
)


def small(**kw):
    base = dict(K=100, q_list=(8,), distributions=("raptor",), epsilon_grid=(0.0, 0.05), trials=50)
    base.update(kw)
    return ExperimentConfig(**base)


def test_default_grid_has_96_rows():
    rows = run_experiment(ExperimentConfig(trials=1))
    assert len(rows) == 96
    labels = []
    for r in rows:
        if r.distribution not in labels:
            labels.append(r.distribution)
    assert labels == ["robust-soliton-c0.05-d0.01", "robust-soliton-c0.05-d0.001", "raptor", "novel"]
    assert [r.epsilon for r in rows[:6]] == list(DEFAULT_EPSILONS)
    assert [r.n for r in rows[:6]] == [100, 101, 102, 103, 104, 105]


def test_single_trial_rates():
    for r in run_experiment(small(trials=1)):
        assert r.failure_rate in (0.0, 1.0) and r.std_err == 0.0


def test_runs_are_reproducible():
    a = run_experiment(small(seed=4))
    b = run_experiment(small(seed=4))
    assert a == b


def test_seed_changes_outcomes():
    rows = [run_experiment(small(seed=s, trials=200))[0].failures for s in range(3)]
    assert len(set(rows)) > 1


def test_trial_rng_is_keyed():
    a = trial_rng(1, "raptor", 8, 100, 0).integers(0, 2**32, 4)
    assert (a == trial_rng(1, "raptor", 8, 100, 0).integers(0, 2**32, 4)).all()
    for other in [(2, "raptor", 8, 100, 0), (1, "novel", 8, 100, 0), (1, "raptor", 16, 100, 0),
                  (1, "raptor", 8, 101, 0), (1, "raptor", 8, 100, 1)]:
        assert not (a == trial_rng(*other).integers(0, 2**32, 4)).all()


def test_trial_order_does_not_matter():
    sl = Slice(Distribution("novel"), 16, 100, 102, 3, "square-replace", "per-symbol")
    forward = [run_trial(sl, t).failed for t in range(30)]
    backward = [run_trial(sl, t).failed for t in reversed(range(30))][::-1]
    assert forward == backward


def test_successful_trials_recover_source():
    for kind in ("robust", "raptor", "novel", "random-linear"):
        sl = Slice(Distribution(kind), 8, 100, 110, 0, "rectangular", "per-session", symbol_len=3)
        outs = [run_trial(sl, t) for t in range(40)]
        assert all(o.mismatches == 0 for o in outs)
        assert any(not o.failed for o in outs)


def test_random_linear_matches_closed_form():
    K, q, n, trials = 20, 2, 22, 4000
    sl = Slice(Distribution("random-linear"), q, K, n, 9, "rectangular", "")
    fails = sum(run_trial(sl, t).failed for t in range(trials))
    p = failure_rate(K, n, q)
    assert abs(fails / trials - p) <= 3 * math.sqrt(p * (1 - p) / trials)


def test_rectangular_improves_with_overhead():
    rows = run_experiment(small(distributions=("robust:0.01",), q_list=(4,),
                                epsilon_grid=(0.0, 0.2), trials=300, decode_mode="rectangular"))
    assert rows[1].failure_rate < rows[0].failure_rate


def test_larger_field_does_not_hurt():
    rows = run_experiment(small(q_list=(4, 32), epsilon_grid=(0.0,), trials=400))
    se = math.hypot(rows[0].std_err, rows[1].std_err)
    assert rows[1].failure_rate <= rows[0].failure_rate + 3 * se


def test_tail_mode_recorded_only_for_novel():
    rows = run_experiment(small(distributions=("raptor", "novel"), trials=2, tail_mode="per-session"))
    assert {r.tail_mode for r in rows if r.distribution == "novel"} == {"per-session"}
    assert {r.tail_mode for r in rows if r.distribution == "raptor"} == {""}


@pytest.mark.parametrize("kw", [dict(trials=0), dict(q_list=(6,)), dict(decode_mode="x"),
                                dict(tail_mode="x"), dict(K=50), dict(seed=-1),
                                dict(distributions=("novel",), q_list=(2,)),
                                dict(distributions=("bogus",)), dict(epsilon_grid=(-0.1,))])
def test_bad_configs(kw):
    with pytest.raises(ConfigError):
        small(**kw).validate()


def test_parse_distributions():
    d = parse_distributions(["robust", "robust:0.1", "raptor"], c=0.05, deltas=(0.01, 0.001))
    assert [x.label for x in d] == ["robust-soliton-c0.05-d0.01", "robust-soliton-c0.05-d0.001",
                                    "robust-soliton-c0.05-d0.1", "raptor"]


def test_epsilon_grid():
    assert epsilon_grid(0.05, 0.01) == DEFAULT_EPSILONS
    assert epsilon_grid(0.0, 0.01) == (0.0,)
    with pytest.raises(ConfigError):
        epsilon_grid(0.05, 0)


def test_csv_roundtrip(tmp_path):
    rows = run_experiment(small())
    path = tmp_path / "r.csv"
    write_csv(rows, path)
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(COLUMNS)
    assert len(text.splitlines()) == len(rows) + 1
    assert "\r" not in text
    back = read_csv(path)
    assert [(r.distribution, r.q, r.n, r.failures) for r in back] == \
           [(r.distribution, r.q, r.n, r.failures) for r in rows]


def test_csv_header_only(tmp_path):
    path = tmp_path / "e.csv"
    write_csv([], path)
    assert path.read_text() == ",".join(COLUMNS) + "\n"
    assert read_csv(path) == []


def test_csv_default_grid_line_count(tmp_path):
    path = tmp_path / "d.csv"
    write_csv(run_experiment(ExperimentConfig(trials=1)), path)
    assert len(path.read_text().splitlines()) == 97


def test_result_row_stats():
    r = ResultRow.from_counts("raptor", 8, 100, 0.0, 100, 400, 100, "square-replace", 0, "")
    assert r.failure_rate == 0.25
    assert r.std_err == pytest.approx(math.sqrt(0.25 * 0.75 / 400))


def test_analytic_rows():
    rows = analytic_rows(100, (2, 4), epsilon_grid(0.05, 0.01))
    assert len(rows) == 12
    assert rows[0].failure_rate == pytest.approx(failure_rate(100, 100, 2))
    assert all(r.trials == 0 and r.decode_mode == "analytic" for r in rows)
    assert np.all(np.diff([r.failure_rate for r in rows[:6]]) < 0)
