"""Command-line experiment harness.

Modes: ``gen-instances`` (seeded instance file), ``train-init``
(warm-start angle training), ``detect`` (per-instance refinement and
readout), ``compare`` (paired trained-vs-random runs with curve and
summary files), and ``selftest`` (quick internal consistency battery).

Every output is a pure function of the config file plus the master seed;
records are JSON-lines, curves are CSV, and floats carry 17 significant
digits so reruns are byte-identical.
"""

import argparse
import os
import sys

import numpy as np

from . import localopt
from .errors import ObjectiveEvaluationError, ResourceLimitError
from .instances import (
    brute_force_detect,
    generate_instance,
    read_instances,
    write_instances,
)
from .ising import build_ising, index_to_bitstring, index_to_spins, spins_to_bits
from .jsonio import SCHEMA_VERSION, dump_line, dumps, format_float, loads
from .rng import STREAM_ANTENNA_CHOICE, STREAM_INSTANCE_SEEDS, STREAM_RANDOM_INIT, substream
from .simulator import (
    DEFAULT_QUBIT_CAP,
    QaoaParams,
    qaoa_state,
    success_probability,
)
from .simulator import expectation as simulator_expectation
from .warmstart import (
    DEFAULT_BETA_MAX,
    DEFAULT_GAMMA_MAX,
    DEFAULT_TRAIN_N_INIT,
    angle_bounds,
    read_init_params,
    train_init,
    write_init_params,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_PARTIAL = 3

MAX_QUBITS_ENV = "QAOA_MIMO_MAX_QUBITS"

TRAINED_INIT = "trained-init"
RANDOM_INIT = "random-init"


class ConfigError(Exception):
    """Invalid or incomplete run configuration."""


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            config = loads(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError(f"config {path} must contain a JSON object")
    return config


def _require(config, key, kind, minimum=None):
    if key not in config:
        raise ConfigError(f"config is missing required key {key!r}")
    value = config[key]
    try:
        value = kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key {key!r} has invalid value {config[key]!r}") from exc
    if minimum is not None and value < minimum:
        raise ConfigError(f"config key {key!r} must be >= {minimum}, got {value}")
    return value


def _optional(config, key, kind, default, minimum=None):
    if key not in config or config[key] is None:
        return default
    return _require(config, key, kind, minimum)


def _resolve_seed(config, seed_override):
    if seed_override is not None:
        return int(seed_override)
    if "seed" not in config or config["seed"] is None:
        raise ConfigError("a seed is required (config key 'seed' or --seed)")
    return _require(config, "seed", int, minimum=0)


def _resolve_out(config, out_override):
    out = out_override if out_override is not None else config.get("out")
    if not out:
        raise ConfigError("an output path is required (config key 'out' or --out)")
    return out


def _resolve_max_qubits(config):
    env = os.environ.get(MAX_QUBITS_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"{MAX_QUBITS_ENV} must be an integer, got {env!r}") from exc
    return _optional(config, "max_qubits", int, DEFAULT_QUBIT_CAP, minimum=1)


def _resolve_path(config, key):
    path = config.get(key)
    if not path:
        raise ConfigError(f"config is missing required path {key!r}")
    if not os.path.exists(path):
        raise ConfigError(f"config path {key!r} does not exist: {path}")
    return path


def cmd_gen_instances(config, seed, out):
    count = _require(config, "count", int, minimum=1)
    noise_scale = _optional(config, "noise_scale", float, 1.0, minimum=0.0)
    n_t = config.get("n_t")
    if isinstance(n_t, list):
        choices = [int(v) for v in n_t]
    elif n_t is not None:
        choices = [int(n_t)]
    else:
        raise ConfigError("config is missing required key 'n_t'")
    if any(c < 1 for c in choices):
        raise ConfigError("all n_t values must be >= 1")
    n_r = _optional(config, "n_r", int, None, minimum=1)

    seeds = substream(seed, STREAM_INSTANCE_SEEDS).integers(0, 2**63, size=count)
    picks = substream(seed, STREAM_ANTENNA_CHOICE).integers(0, len(choices), size=count)
    instances = []
    for inst_seed, pick in zip(seeds, picks):
        nt = choices[int(pick)]
        instances.append(generate_instance(nt, n_r if n_r is not None else nt, noise_scale, int(inst_seed)))
    write_instances(out, instances)
    print(f"wrote {count} instances to {out}")
    return EXIT_OK


def _resolve_bounds(config, p):
    gamma_max = _optional(config, "gamma_max", float, DEFAULT_GAMMA_MAX, minimum=0.0)
    beta_max = _optional(config, "beta_max", float, DEFAULT_BETA_MAX, minimum=0.0)
    return angle_bounds(p, gamma_max=gamma_max, beta_max=beta_max)


def cmd_train_init(config, seed, out):
    instances = read_instances(_resolve_path(config, "instances"))
    p = _require(config, "p", int, minimum=1)
    t_rounds = _require(config, "t_rounds", int, minimum=1)
    kappa = _optional(config, "kappa", float, 2.0, minimum=0.0)
    n_init = _optional(config, "n_init", int, DEFAULT_TRAIN_N_INIT, minimum=1)
    max_qubits = _resolve_max_qubits(config)

    init = train_init(
        instances,
        p=p,
        t_rounds=t_rounds,
        kappa=kappa,
        seed=seed,
        n_init=n_init,
        bounds=_resolve_bounds(config, p),
        max_qubits=max_qubits,
    )
    write_init_params(out, init)
    print(
        f"trained {2 * p} angles on {len(instances)} instances; "
        f"ensemble objective {format_float(init.training_meta['final_objective'])}"
    )
    return EXIT_OK


def _run_detection(inst, theta0, method, bounds, budget, tol, top_k, max_qubits):
    """Refine angles on one instance and assemble its report record."""
    model = build_ising(inst)

    def objective(theta):
        return simulator_expectation(model, QaoaParams.from_vector(theta), max_qubits)

    trace = localopt.minimize(objective, theta0, bounds=bounds, budget=budget, tol=tol)
    state = qaoa_state(model, QaoaParams.from_vector(trace.best_point), max_qubits)
    probs = state.amplitudes.real**2 + state.amplitudes.imag**2

    order = np.argsort(-probs, kind="stable")[:top_k]
    argmax_index = int(np.argmax(probs))
    decoded = index_to_spins(argmax_index, model.n)
    x_best, ml_value = brute_force_detect(inst)

    report = {
        "schema_version": SCHEMA_VERSION,
        "instance_seed": inst.seed,
        "n_t": inst.n_t,
        "n_r": inst.n_r,
        "method": method,
        "initial_point": [float(v) for v in theta0],
        "best_point": [float(v) for v in trace.best_point],
        "best_value": float(trace.best_value),
        "n_evaluations": len(trace.evaluations),
        "converged": trace.converged,
        "reason": trace.reason,
        "top_states": [
            {"bitstring": index_to_bitstring(int(m), model.n), "probability": float(probs[m])}
            for m in order
        ],
        "argmax_bitstring": index_to_bitstring(argmax_index, model.n),
        "decoded_symbols": [int(v) for v in decoded],
        "bruteforce_symbols": [int(v) for v in x_best],
        "bruteforce_bitstring": spins_to_bits(x_best),
        "bruteforce_value": float(ml_value),
        "success": bool(np.array_equal(decoded, x_best)),
        "solution_probability": success_probability(state, x_best),
    }
    return report, trace


def _detection_settings(config):
    p = _require(config, "p", int, minimum=1)
    budget = _optional(config, "budget", int, 150, minimum=1)
    tol = _optional(config, "tol", float, 1e-6)
    top_k = _optional(config, "top_k", int, 8, minimum=1)
    return p, budget, tol, top_k, _resolve_bounds(config, p)


def _random_init_points(seed, count, bounds):
    """One uniform draw over the angle box per instance, in file order."""
    gen = substream(seed, STREAM_RANDOM_INIT)
    low, span = bounds[:, 0], bounds[:, 1] - bounds[:, 0]
    return [low + gen.random(bounds.shape[0]) * span for _ in range(count)]


def cmd_detect(config, seed, out):
    instances = read_instances(_resolve_path(config, "instances"))
    p, budget, tol, top_k, bounds = _detection_settings(config)
    max_qubits = _resolve_max_qubits(config)

    if config.get("init"):
        init = read_init_params(_resolve_path(config, "init"))
        if init.p != p:
            raise ConfigError(f"init file has p={init.p} but config requests p={p}")
        starts = [init.to_vector()] * len(instances)
        method = TRAINED_INIT
    else:
        starts = _random_init_points(seed, len(instances), bounds)
        method = RANDOM_INIT

    failures = 0
    with open(out, "w") as fh:
        for inst, theta0 in zip(instances, starts):
            try:
                report, _ = _run_detection(inst, theta0, method, bounds, budget, tol, top_k, max_qubits)
            except Exception as exc:
                failures += 1
                report = {
                    "schema_version": SCHEMA_VERSION,
                    "instance_seed": inst.seed,
                    "n_t": inst.n_t,
                    "method": method,
                    "error": f"{type(exc).__name__}: {exc}",
                }
            dump_line(report, fh)
    done = len(instances) - failures
    print(f"detected {done}/{len(instances)} instances ({method}) -> {out}")
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_compare(config, seed, out):
    """Paired trained-init vs random-init runs on the same instance set."""
    instances = read_instances(_resolve_path(config, "instances"))
    init = read_init_params(_resolve_path(config, "init"))
    p, budget, tol, top_k, bounds = _detection_settings(config)
    max_qubits = _resolve_max_qubits(config)
    if init.p != p:
        raise ConfigError(f"init file has p={init.p} but config requests p={p}")

    os.makedirs(out, exist_ok=True)
    trained_start = init.to_vector()
    random_starts = _random_init_points(seed, len(instances), bounds)

    rows = []
    reports = []
    results = {TRAINED_INIT: [], RANDOM_INIT: []}
    failures = 0
    for inst, random_start in zip(instances, random_starts):
        for method, theta0 in ((TRAINED_INIT, trained_start), (RANDOM_INIT, random_start)):
            try:
                report, trace = _run_detection(
                    inst, theta0, method, bounds, budget, tol, top_k, max_qubits
                )
            except Exception as exc:
                failures += 1
                reports.append(
                    {
                        "schema_version": SCHEMA_VERSION,
                        "instance_seed": inst.seed,
                        "method": method,
                        "error": f"{type(exc).__name__}: {exc}",
                    }
                )
                continue
            reports.append(report)
            results[method].append(report)
            for iteration, (_, value) in enumerate(trace.evaluations):
                rows.append((iteration, value, method, inst.seed))

    with open(os.path.join(out, "reports.jsonl"), "w") as fh:
        for report in reports:
            dump_line(report, fh)
    with open(os.path.join(out, "curves.csv"), "w") as fh:
        fh.write("iteration,cost,method,instance\n")
        for iteration, value, method, inst_seed in rows:
            fh.write(f"{iteration},{format_float(value)},{method},{inst_seed}\n")

    summary = _compare_summary(instances, results, failures)
    with open(os.path.join(out, "summary.json"), "w") as fh:
        fh.write(dumps(summary))
        fh.write("\n")
    print(
        f"compared {len(instances)} instances -> {out} "
        f"(trained better on {summary['fraction_trained_better']})"
    )
    return EXIT_PARTIAL if failures else EXIT_OK


def _compare_summary(instances, results, failures):
    trained = {r["instance_seed"]: r for r in results[TRAINED_INIT]}
    randoms = {r["instance_seed"]: r for r in results[RANDOM_INIT]}
    paired = [s for s in trained if s in randoms]
    better = sum(1 for s in paired if trained[s]["best_value"] < randoms[s]["best_value"])
    summary = {
        "schema_version": SCHEMA_VERSION,
        "n_instances": len(instances),
        "n_paired": len(paired),
        "n_failures": failures,
        "fraction_trained_better": better / len(paired) if paired else 0.0,
        "median_final_cost": {},
        "mean_solution_probability": {},
        "success_rate": {},
    }
    for method, rows in results.items():
        if rows:
            summary["median_final_cost"][method] = float(
                np.median([r["best_value"] for r in rows])
            )
            summary["mean_solution_probability"][method] = float(
                np.mean([r["solution_probability"] for r in rows])
            )
            summary["success_rate"][method] = float(np.mean([r["success"] for r in rows]))
    return summary


def cmd_selftest(seed):
    """Quick internal consistency battery; exit 0 only if every check passes."""
    from .closed_form import depth1_expectation
    from .ising import ising_energy
    from .instances import ml_objective
    from .bayesopt import SquaredExponentialKernel, bayes_opt, gp_fit, gp_predict
    from .simulator import hamiltonian_diagonal

    gen = np.random.default_rng(seed)
    checks = []

    worst = 0.0
    for _ in range(20):
        n = int(gen.integers(2, 7))
        inst = generate_instance(n, n, 1.0, int(gen.integers(0, 2**63)))
        model = build_ising(inst)
        gamma = float(gen.uniform(0, np.pi / 2))
        beta = float(gen.uniform(0, np.pi))
        sim = simulator_expectation(model, QaoaParams(p=1, gammas=[gamma], betas=[beta]))
        worst = max(worst, abs(sim - depth1_expectation(model, gamma, beta)))
    checks.append(("closed-form-vs-simulator", worst <= 1e-9, f"max diff {worst:.3e}"))

    worst = 0.0
    ground_ok = True
    for _ in range(10):
        n = int(gen.integers(2, 7))
        inst = generate_instance(n, n, 1.0, int(gen.integers(0, 2**63)))
        model = build_ising(inst)
        diag = hamiltonian_diagonal(model)
        for m in range(1 << n):
            x = index_to_spins(m, n)
            worst = max(worst, abs(ising_energy(model, x) + model.offset - ml_objective(inst, x)))
        x_best, _ = brute_force_detect(inst)
        if not np.array_equal(index_to_spins(int(np.argmin(diag)), n), x_best):
            ground_ok = False
    checks.append(("offset-identity", worst <= 1e-9, f"max diff {worst:.3e}"))
    checks.append(("ground-state-agreement", ground_ok, ""))

    inst = generate_instance(5, 5, 1.0, int(gen.integers(0, 2**63)))
    model = build_ising(inst)
    params = QaoaParams(p=3, gammas=gen.uniform(0, 1, 3), betas=gen.uniform(0, 1, 3))
    amps = qaoa_state(model, params).amplitudes
    norm_err = abs(float(np.sum(amps.real**2 + amps.imag**2)) - 1.0)
    checks.append(("statevector-norm", norm_err <= 1e-12, f"deviation {norm_err:.3e}"))

    points = gen.uniform(0, 1, (5, 2))
    values = gen.normal(size=5)
    kernel = SquaredExponentialKernel(noise_variance=1e-8)
    post = gp_fit(points, values, kernel)
    kmat = kernel.matrix(points, points) + 1e-8 * np.eye(5)
    x = gen.uniform(0, 1, 2)
    kstar = kernel.matrix(points, x[None, :])[:, 0]
    direct_mean = float(kstar @ np.linalg.solve(kmat, values))
    mean, _ = gp_predict(post, x)
    gp_err = abs(mean - direct_mean)
    checks.append(("gp-direct-formula", gp_err <= 1e-8, f"diff {gp_err:.3e}"))

    history = bayes_opt(
        lambda v: -((v[0] - 0.3) ** 2),
        np.array([[0.0, 1.0]]),
        t_rounds=15,
        kappa=2.0,
        n_init=5,
        seed=seed,
    )
    bo_err = abs(float(history.best_point[0]) - 0.3)
    checks.append(("bayesopt-quadratic", bo_err <= 0.1, f"|x*-0.3| = {bo_err:.3f}"))

    all_ok = True
    for name, ok, detail in checks:
        status = "PASS" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        print(f"selftest {name}: {status}{suffix}")
        all_ok = all_ok and ok
    return EXIT_OK if all_ok else EXIT_RUNTIME


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qaoa-mimo",
        description="QAOA-based ML detection experiments on simulated MIMO channels",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, needs_out in (
        ("gen-instances", True),
        ("train-init", True),
        ("detect", True),
        ("compare", True),
        ("selftest", False),
    ):
        mode_parser = sub.add_parser(mode)
        mode_parser.add_argument("--config", help="JSON config file")
        mode_parser.add_argument("--seed", type=int, help="master seed (overrides config)")
        if needs_out:
            mode_parser.add_argument("--out", help="output path (overrides config)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args.config)
        if args.mode == "selftest":
            seed = int(args.seed) if args.seed is not None else _optional(config, "seed", int, 0)
            return cmd_selftest(seed)
        seed = _resolve_seed(config, args.seed)
        out = _resolve_out(config, args.out)
        if args.mode == "gen-instances":
            return cmd_gen_instances(config, seed, out)
        if args.mode == "train-init":
            return cmd_train_init(config, seed, out)
        if args.mode == "detect":
            return cmd_detect(config, seed, out)
        return cmd_compare(config, seed, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ResourceLimitError, ObjectiveEvaluationError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
