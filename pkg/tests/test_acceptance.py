"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The verdict lines are repeated in the terminal summary. The full default
experiment (criterion 6) takes roughly five minutes on one core and is
marked ``slow``; deselect it with ``-m "not slow"``.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import VERDICTS
from molts import environment as envmod
from molts import harness, pareto
from molts.harness import CONTEXT_STREAM, NOISE_STREAM, POLICY_STREAM, ExperimentConfig, derive_rng
from molts.linalg import RlsState, elliptical_potential_bound
from molts.policies import PolicyConfig, min_samples, optimism_frequency

from oracles import direct_ridge, grid_effective_gaps

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def verdict(name, passed, detail):
    VERDICTS.append((name, bool(passed), detail))
    print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    assert passed, detail


def test_criterion_1_geometry_matches_grid_oracle():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    member_mismatch, worst = 0, 0.0
    for _ in range(1000):
        K, L = rng.integers(1, 7), rng.integers(1, 4)
        t = rng.uniform(0, 1, (K, L))
        grid = grid_effective_gaps(t)
        front = set(pareto.effective_front(t))
        member_mismatch += front != {a for a in range(K) if grid[a] == 0.0}
        worst = max(worst, float(np.max(np.abs(pareto.effective_gaps(t) - grid))))
    elapsed = time.perf_counter() - start
    verdict("1 geometry oracle", member_mismatch == 0 and worst <= 2e-3 and elapsed < 120,
            f"membership mismatches={member_mismatch}, max gap diff={worst:.2e} (tol 2e-3), {elapsed:.0f}s (< 120s)")


def test_criterion_2_front_and_gap_laws():
    rng = np.random.default_rng(2)
    violations = 0
    for _ in range(10_000):
        K, L = rng.integers(1, 21), rng.integers(1, 6)
        t = rng.uniform(-1, 1, (K, L))
        pf, ef = set(pareto.pareto_front(t)), set(pareto.effective_front(t))
        pg, eg = pareto.pareto_gaps(t), pareto.effective_gaps(t)
        violations += not ef <= pf
        violations += int(np.sum(pg > eg))
        violations += sum(pg[a] != 0.0 for a in pf) + sum(eg[a] != 0.0 for a in ef)
    verdict("2 front/gap laws", violations == 0, f"violations={violations} over 10000 tables")


def test_criterion_3_scalarization_correspondence():
    rng = np.random.default_rng(3)
    violations = unique = 0
    for _ in range(500):
        K, L = rng.integers(1, 9), rng.integers(1, 5)
        t = rng.uniform(-1, 1, (K, L))
        ef = set(pareto.effective_front(t))
        for w in rng.dirichlet(np.ones(L), size=100):
            arg = pareto.scalarized_argmax(t, w)
            if len(arg) == 1:
                unique += 1
                violations += arg[0] not in ef
        for a in ef:
            w = pareto.weight_for_arm(t, a)
            violations += w is None or a not in pareto.scalarized_argmax(t, w)
    verdict("3 scalarization", violations == 0, f"violations={violations} ({unique} unique argmaxes checked)")


def test_criterion_4_joint_optimism_frequency():
    trials = 100_000
    floor = 0.15 - 3 * math.sqrt(0.15 * 0.85 / trials)
    start = time.perf_counter()
    rows = [(L, min_samples(L, 0.15)) for L in (1, 2, 4, 8)] + [(2, 5)]
    freqs = []
    for L, M in rows:
        rng = np.random.default_rng(40 + L + M)
        x = rng.standard_normal(5)
        x /= np.linalg.norm(x)
        freqs.append(optimism_frequency(RlsState(5, L), x, PolicyConfig(num_samples=M), trials, rng))
    elapsed = time.perf_counter() - start
    detail = ", ".join(f"L={L} M={M}: {f:.4f}" for (L, M), f in zip(rows, freqs))
    verdict("4 joint optimism", min(freqs) >= floor and elapsed < 60,
            f"{detail} (floor {floor:.4f}), {elapsed:.0f}s (< 60s)")


def test_criterion_5_rls_numerics():
    rng = np.random.default_rng(5)
    d, n = 10, 10_000
    X = rng.standard_normal((n, d))
    X /= np.maximum(1.0, np.linalg.norm(X, axis=1))[:, None]
    R = X @ rng.standard_normal((d, 2)) + rng.standard_normal((n, 2))
    s = RlsState(d, 2, 1.0)
    potential = 0.0
    for x, r in zip(X, R):
        potential += s.mahalanobis(x) ** 2
        s.update(x, r)
    theta, _ = direct_ridge(X, R, 1.0)
    rel = float(np.max(np.linalg.norm(s.estimates - theta, axis=1) / np.linalg.norm(theta, axis=1)))
    bound = elliptical_potential_bound(d, n, 1.0)
    verdict("5 RLS numerics", rel <= 1e-8 and potential <= bound,
            f"relative error={rel:.2e} (tol 1e-8), potential={potential:.3f} <= {bound:.3f}")


@pytest.mark.slow
def test_criterion_6_default_experiment():
    cfg = harness.load_config(CONFIGS / "default.cfg")
    start = time.perf_counter()
    result = harness.run_experiment(cfg)
    elapsed = time.perf_counter() - start
    assert not result.failures
    summary = harness.summarize(result)

    def final(label):
        return summary.mean(label, "epr")[-1]

    per_round = np.mean([g.effective_gaps for g in result.ledgers["mol-ts"]], axis=0)
    early, late = per_round[:1000].mean(), per_round[9000:].mean()
    checks = {
        "a": late <= 0.5 * early,
        "b": final("mol-ts") < final("eps-greedy"),
        "c": final("mol-ts") <= final("mol-ts-m1"),
    }
    exceeded = sum(int(np.sum(summary.mean(a, "epr") > summary.series[(a, "bound")][0]))
                   for a in ("mol-ts", "mol-ts-m1"))
    detail = (f"(a) late/early per-round EPR={late:.4f}/{early:.4f}={late / early:.2f} (<= 0.5); "
              f"(b) EPR(T) mol-ts={final('mol-ts'):.1f} vs eps-greedy={final('eps-greedy'):.1f}; "
              f"(c) mol-ts-m1={final('mol-ts-m1'):.1f}; mol-ucb={final('mol-ucb'):.1f}; "
              f"bound exceeded at {exceeded} rounds; {elapsed / 60:.1f} min")
    verdict("6 default experiment", all(checks.values()) and exceeded == 0 and elapsed < 1800, detail)


def _reference_rollout(cfg, instance, kind):
    """Textbook single-objective linear TS / LinUCB against the shared streams."""
    env = cfg.make_env(instance)
    ctx_rng = derive_rng(cfg.master_seed, instance, CONTEXT_STREAM)
    noise_rng = derive_rng(cfg.master_seed, instance, NOISE_STREAM)
    label = "mol-ts-m1" if kind == "ts" else "mol-ucb"
    rng = derive_rng(cfg.master_seed, instance, POLICY_STREAM, label)
    d, lam = cfg.dim, cfg.regularizer
    V, b = lam * np.eye(d), np.zeros(d)
    arms = []
    for t in range(1, cfg.horizon + 1):
        out = envmod.gen_contexts(env, ctx_rng)
        X = out.contexts
        V_inv = np.linalg.inv(V)
        theta = V_inv @ b
        beta = cfg.noise_bound * math.sqrt(d * math.log((1 + (t - 1) / (lam * d)) / cfg.delta)) + math.sqrt(lam)
        if kind == "ts":
            sample = theta + beta * np.linalg.cholesky(V_inv) @ rng.standard_normal(d)
            score = X @ sample
        else:
            score = X @ theta + beta * np.sqrt(np.einsum("kd,de,ke->k", X, V_inv, X))
        best = np.flatnonzero(score == score.max())
        a = int(best[rng.integers(len(best))])
        arms.append(a)
        x = X[a]
        r = out.pull(a, noise_rng)[0]
        V += np.outer(x, x)
        b += r * x
    return arms


def test_criterion_7_single_objective_degenerations():
    cfg = ExperimentConfig(master_seed=11, num_instances=5, horizon=100, num_arms=10, dim=5,
                           num_objectives=1, noise_sigma=1.0, algorithms=("mol-ts-m1", "mol-ucb"))
    mismatches = 0
    for i in range(cfg.num_instances):
        for label, kind in (("mol-ts-m1", "ts"), ("mol-ucb", "ucb")):
            ours = harness.run_instance(cfg, i, label).arms.tolist()
            mismatches += sum(p != q for p, q in zip(ours, _reference_rollout(cfg, i, kind)))
    verdict("7 degenerations", mismatches == 0,
            f"decision mismatches={mismatches} over 2 x 5 trajectories of 100 rounds")


def test_criterion_8_determinism(tmp_path):
    outputs = []
    for name, workers in (("seq", 1), ("seq_again", 1), ("par", 2)):
        out = tmp_path / name
        harness.write_outputs(harness.run_experiment(harness.load_config(
            CONFIGS / "smoke.cfg", horizon=120, num_instances=3, workers=workers, out_dir=str(out))))
        outputs.append({p.relative_to(out).as_posix(): p.read_bytes()
                        for p in sorted(out.rglob("*")) if p.is_file() and p.name != "config.cfg"})
    # config.cfg records the worker count and output path, so it is left out.
    same = "summary.csv" in outputs[0] and outputs[0] == outputs[1] == outputs[2]
    verdict("8 determinism", same,
            f"{len(outputs[0])} output files identical across rerun and workers=2")
