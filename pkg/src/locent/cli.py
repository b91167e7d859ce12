"""Command-line entry point: one subcommand per operation family.

Every artifact embeds its fully resolved configuration and seed, and
regenerating an artifact from that embedded configuration is byte-identical
(the `replay` subcommand does exactly that).  Exit codes: 0 success with
all checks green, 1 usage error, 2 check failures (reports still written).

Precedence of settings: command-line flags > config file keys > defaults.
The config file is INI-style: keys for a subcommand live in a section of
the same name (a [run] section applies to any subcommand).  Search budgets
are also overridable through LOCENT_* environment variables (see util.env_budget
call sites: PACK_NODE_BUDGET, MULTISET_CAP, RESTARTS, SWAP_TRIES, EPS_DENSE,
CENTER_CAP, VC_BUDGET, GROWTH_BUDGET, STAR_BUDGET, STAR_CAP, COVER_NODE_BUDGET,
POSITION_CAP).
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys

import numpy as np

from . import classes, experiments, geometry, measures, processes
from .erm import ErmPolicy, build_adversarial_family, kl_product, run_trial
from .util import make_rng

USAGE_ERROR = 1
CHECK_FAILURE = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# class / instance construction from resolved options


def _build_class(opts) -> tuple[classes.HypothesisClass, dict]:
    gen = opts["generator"]
    if gen == "thresholds":
        n = int(opts["points"])
        cls = classes.make_thresholds(classes.PointDomain.from_coords(np.arange(1.0, n + 1.0)))
        return cls, {"generator": gen, "points": n}
    if gen in ("f1", "f2", "f3"):
        d, s = int(opts["d"]), int(opts["s"])
        grid = int(opts.get("grid") or 8)
        cls = classes.make_star_class(gen.upper(), d, s, grid=grid)
        desc = {"generator": gen, "d": d, "s": s}
        if gen == "f3":
            desc["grid"] = grid
        return cls, desc
    if gen == "linsep-circle":
        n = int(opts["points"])
        cls = classes.make_linear_separators(experiments.circle_domain(n))
        return cls, {"generator": gen, "points": n, "projected": True}
    if gen == "file":
        path = opts["class_file"]
        if not path:
            raise ValueError("generator 'file' needs --class-file")
        return classes.load_class(path), {"generator": gen, "class_file": path}
    raise ValueError(f"unknown generator {gen!r}")


def _default_target(cls, desc) -> int:
    if desc.get("generator") == "thresholds":
        return (cls.n_points + 1) // 2
    return 0


def _build_instance(cls, desc, opts) -> classes.MassartInstance:
    target = opts.get("target")
    target = _default_target(cls, desc) if target is None else int(target)
    h = float(opts.get("h") or 1.0)
    return classes.make_massart_instance(cls, target, h)


# ---------------------------------------------------------------------------
# option resolution


_OPTION_DEFAULTS = {
    "measures": {"generator": "thresholds", "points": 16, "d": 2, "s": 8, "grid": 8,
                 "class_file": None, "growth_max": 8, "out": None},
    "packing": {"generator": "thresholds", "points": 16, "d": 2, "s": 8, "grid": 8,
                "class_file": None, "kind": "global", "gamma": 1, "n": 8,
                "h": 1.0, "search": "auto", "seed": 0, "out": None},
    "fixed-point": {"generator": "thresholds", "points": 16, "d": 2, "s": 8, "grid": 8,
                    "class_file": None, "kind": "loc", "c": 0.5, "h": 1.0,
                    "h_prime": None, "n": 16, "search": "auto", "seed": 0,
                    "format": "json", "out": None},
    "capacity": {"generator": "thresholds", "points": 16, "d": 2, "s": 8, "grid": 8,
                 "class_file": None, "target": None, "eps": "0.25", "out": None},
    "verify-lemmas": {"generator": "thresholds", "points": 12, "d": 2, "s": 8, "grid": 8,
                      "class_file": None, "h": 0.5, "c": 0.25, "n": 12,
                      "trials": 200, "seed": 7, "k_loc": 64.0, "out": None},
    "erm-run": {"generator": "thresholds", "points": 16, "d": 2, "s": 8, "grid": 8,
                "class_file": None, "target": None, "h": 1.0, "n": 16,
                "trials": 100, "policy": "first_index", "seed": 0, "out": None},
    "erm-sweep": {"generator": "thresholds", "points": None, "d": 2, "s": 8, "grid": 8,
                  "class_file": None, "h_grid": "1.0", "n_grid": "32,64",
                  "trials": 200, "policy": "first_index", "seed": 0,
                  "search": "auto", "workers": 1, "out": None},
    "lower-bound-family": {"generator": "f1", "points": 16, "d": 2, "s": 8, "grid": 8,
                           "class_file": None, "h": 0.5, "n_budget": 32,
                           "trials": 0, "search": "auto", "seed": 0, "out": None},
    "star-theorem": {"generator": "f1", "points": 16, "d": 2, "s": 8, "grid": 8,
                     "class_file": None, "n": 32, "trials": 500, "seed": 0,
                     "target": None, "out": None},
    "sandwich": {"generator": "thresholds", "points": 32, "d": 2, "s": 8, "grid": 8,
                 "class_file": None, "h": 1.0, "n": 32, "search": "auto",
                 "seed": 0, "out": None},
}

_INT_KEYS = {"points", "d", "s", "grid", "growth_max", "gamma", "n", "trials",
             "seed", "n_budget", "workers"}
_FLOAT_KEYS = {"h", "c", "h_prime", "k_loc"}


def _coerce(key: str, value):
    if value is None:
        return None
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    return value


def _resolve(sub: str, cli_args: dict, config_path: str | None) -> dict:
    opts = dict(_OPTION_DEFAULTS[sub])
    if config_path:
        ini = configparser.ConfigParser()
        read = ini.read(config_path)
        if not read:
            raise FileNotFoundError(f"config file not found: {config_path}")
        for section in ("run", sub):
            if ini.has_section(section):
                for key, value in ini.items(section):
                    key = key.replace("-", "_")
                    if key not in opts:
                        raise ValueError(f"unknown config key {key!r} in [{section}]")
                    opts[key] = _coerce(key, value)
    for key, value in cli_args.items():
        if value is not None:
            opts[key] = _coerce(key, value)
    return opts


def _grid(text: str, conv) -> tuple:
    items = tuple(conv(tok) for tok in str(text).split(",") if tok.strip())
    if not items:
        raise ValueError(f"empty grid {text!r}")
    return items


# ---------------------------------------------------------------------------
# artifact writing


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not serializable: {type(obj)}")


def _emit_csv(lines: list[str], config: dict, out: str | None) -> None:
    header = "# config " + json.dumps(config, sort_keys=True, default=_json_default)
    text = "\n".join([header] + lines) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommand bodies (each returns an exit code)


def _cmd_measures(opts, config) -> int:
    cls, desc = _build_class(opts)
    d = measures.vc_dimension(cls)
    s = measures.star_number(cls)
    growth = []
    for m in range(1, int(opts["growth_max"]) + 1):
        g = measures.growth_function(cls, m)
        growth.append({"m": m, "value": g.value, "exact": g.exact})
    payload = {
        "config": config,
        "results": {
            "class": desc,
            "projected": bool(desc.get("projected", False)),
            "d": {"value": d.value, "exact": d.exact, "witness": list(d.witness)},
            "s": {"value": s.value, "exact": s.exact,
                  "witness": {"center": s.witness[0], "points": list(s.witness[1]),
                              "rows": list(s.witness[2])}},
            "growth": growth,
        },
    }
    _emit_json(payload, opts["out"])
    return 0


def _cmd_packing(opts, config) -> int:
    cls, desc = _build_class(opts)
    n = int(opts["n"])
    gamma = int(opts["gamma"])
    if opts["kind"] == "global":
        res = geometry.global_packing_number(cls, gamma, n, search=opts["search"],
                                             seed=int(opts["seed"]))
        body = {"kind": "global", "value": res.size, "multiset": list(res.multiset),
                "witness": list(res.packing.witness), "mode": res.packing.mode,
                "exact": res.exact}
    elif opts["kind"] == "local":
        res = geometry.local_packing_number(cls, gamma, n, float(opts["h"]),
                                            search=opts["search"], seed=int(opts["seed"]))
        body = {"kind": "local", "value": res.value, "eps": res.eps,
                "center_row": res.center_row,
                "multiset": None if res.multiset is None else list(res.multiset),
                "witness": list(res.witness), "ball_radius": res.ball_radius,
                "separation": res.separation, "mode": res.mode, "exact": res.exact}
    else:
        raise ValueError(f"unknown packing kind {opts['kind']!r}")
    _emit_json({"config": config, "results": {"class": desc, **body}}, opts["out"])
    return 0


def _cmd_fixed_point(opts, config) -> int:
    cls, desc = _build_class(opts)
    n = int(opts["n"])
    if opts["kind"] == "star":
        fp = geometry.gamma_star(cls, float(opts["c"]), n, search=opts["search"],
                                 seed=int(opts["seed"]))
    elif opts["kind"] == "loc":
        hp = opts["h_prime"]
        hp = float(opts["h"]) if hp is None else float(hp)
        fp = geometry.gamma_loc(cls, float(opts["h"]), hp, n, search=opts["search"],
                                seed=int(opts["seed"]))
    else:
        raise ValueError(f"unknown fixed-point kind {opts['kind']!r}")
    scan = [{"gamma": r["gamma"], "log_packing": r["log_packing"],
             "satisfied": r["satisfied"], "witness_size": r["witness_size"],
             "mode": r["mode"]} for r in fp.scan]
    if opts["format"] == "csv":
        lines = ["gamma,log_packing,satisfied,witness_size,mode"]
        for r in scan:
            lines.append(f"{r['gamma']},{r['log_packing']!r},{int(r['satisfied'])},"
                         f"{r['witness_size']},{r['mode']}")
        lines.append(f"# gamma={fp.gamma} exact={fp.exact}")
        _emit_csv(lines, config, opts["out"])
    else:
        _emit_json({"config": config,
                    "results": {"class": desc, "gamma": fp.gamma, "exact": fp.exact,
                                "params": fp.params, "scan": scan}}, opts["out"])
    return 0


def _cmd_capacity(opts, config) -> int:
    cls, desc = _build_class(opts)
    instance = _build_instance(cls, desc, {**opts, "h": 1.0})
    values = []
    for eps in _grid(opts["eps"], float):
        values.append({"eps": eps, "tau": geometry.alexander_capacity(instance, eps)})
    _emit_json({"config": config,
                "results": {"class": desc, "target": instance.target,
                            "capacity": values}}, opts["out"])
    return 0


def _cmd_verify_lemmas(opts, config) -> int:
    cls, desc = _build_class(opts)
    instance = _build_instance(cls, desc, opts)
    h = instance.margin
    c = float(opts["c"])
    n, trials, seed = int(opts["n"]), int(opts["trials"]), int(opts["seed"])
    view = processes.LossClassView(cls, instance.target, "excess_loss")
    reports = [
        processes.check_symmetrization_expectation(view, instance, 0.0, n, trials, seed),
        processes.check_symmetrization_expectation(view, instance, 2.0, n, trials, seed),
        processes.check_contraction(instance, c, n, trials, seed),
        processes.check_localization_bound(instance, "halved_difference",
                                           min(c, 0.25), n, trials, seed,
                                           k_loc=float(opts["k_loc"])),
        # informational: the minoration constant is unspecified, so this
        # report records the fitted ratio and never fails
        processes.sudakov_check(
            processes.LossClassView(cls, instance.target, "halved_difference")
            .domain_values(), trials=max(trials, 500), seed=seed),
    ]
    payload = {"config": config,
               "results": {"class": desc, "checks": [r.as_dict() for r in reports]}}
    _emit_json(payload, opts["out"])
    return 0 if all(r.passed for r in reports) else CHECK_FAILURE


def _cmd_erm_run(opts, config) -> int:
    cls, desc = _build_class(opts)
    instance = _build_instance(cls, desc, opts)
    policy = ErmPolicy(opts["policy"],
                       instance if opts["policy"] == "pessimistic" else None)
    n, trials, seed = int(opts["n"]), int(opts["trials"]), int(opts["seed"])
    lines = ["n,seed,chosen,empirical_risk,excess,version_space_size,dis_mass"]
    for t in range(trials):
        trial_seed = int(make_rng(seed, t).integers(2 ** 31))
        rep = run_trial(instance, n, policy, trial_seed)
        lines.append(f"{rep.n},{rep.seed},{rep.chosen},{rep.empirical_risk!r},"
                     f"{rep.excess!r},{rep.version_space_size},{rep.dis_mass!r}")
    _emit_csv(lines, config, opts["out"])
    return 0


def _cmd_erm_sweep(opts, config) -> int:
    h_grid = _grid(opts["h_grid"], float)
    n_grid = _grid(opts["n_grid"], int)
    gen = opts["generator"]

    def factory(h, n):
        if gen == "thresholds" and opts["points"] is None:
            return experiments.threshold_instance(n, h)
        cls, desc = _build_class(opts)
        return _build_instance(cls, desc, {**opts, "h": h})

    sweep = experiments.SweepConfig(
        instance_factory=factory, h_grid=h_grid, n_grid=n_grid,
        trials=int(opts["trials"]), policy=opts["policy"], seed=int(opts["seed"]),
        search=opts["search"], spec={k: v for k, v in config.items()})
    table = experiments.run_rate_sweep(sweep, workers=int(opts["workers"]))
    _emit_csv(table.to_csv_lines(), config, opts["out"])
    if opts["out"]:
        for h in h_grid:  # gnuplot-ready two-column series per curve
            rows = [r for r in table.rows if r["h"] == h]
            series = "\n".join(f"{r['n']} {r['mean_excess']!r}" for r in rows) + "\n"
            with open(f"{opts['out']}.h{h:g}.dat", "w", encoding="utf-8") as fh:
                fh.write(series)
    return 0


def _cmd_lower_bound_family(opts, config) -> int:
    cls, desc = _build_class(opts)
    h = float(opts["h"])
    n_budget = int(opts["n_budget"])
    trials = int(opts["trials"])
    seed = int(opts["seed"])
    spec = build_adversarial_family(cls, h, n_budget, search=opts["search"], seed=seed)
    kl01 = kl_product(spec, 0, min(1, spec.size - 1), n_budget) if spec.size > 1 else None
    body = {"class": desc, "n_positions": spec.n_positions, "h": h,
            "center_row": spec.center_row, "rows": list(spec.rows),
            "eps": spec.eps, "gamma": spec.gamma,
            "pseudoconvexity": spec.pseudoconvexity,
            "family_size": spec.size, "family_size_with_center": spec.size_with_center,
            "center_in_family": spec.center_in_family, "exact": spec.exact,
            "kl_first_pair": None if kl01 is None else
            {"closed_form": kl01.closed_form, "exact": kl01.exact, "rho": kl01.rho}}
    if trials > 0:
        body["experiment"] = experiments.lower_bound_report(
            cls, h, n_budget, trials, seed, search=opts["search"])
    _emit_json({"config": config, "results": body}, opts["out"])
    return 0


def _cmd_star_theorem(opts, config) -> int:
    cls, desc = _build_class(opts)
    target = opts.get("target")
    target = _default_target(cls, desc) if target is None else int(target)
    rep = experiments.check_star_theorem(cls, int(opts["n"]), int(opts["trials"]),
                                         int(opts["seed"]), target=target)
    _emit_json({"config": config,
                "results": {"class": desc, "mean_risk": rep.mean_risk, "ci": rep.ci,
                            "bound": rep.bound, "implied_constant": rep.implied_constant,
                            "s": rep.s, "growth_value": rep.growth_value,
                            "exact": rep.exact, **rep.details}}, opts["out"])
    return 0


def _cmd_sandwich(opts, config) -> int:
    cls, desc = _build_class(opts)
    rep = experiments.check_sandwich(cls, float(opts["h"]), int(opts["n"]),
                                     search=opts["search"], seed=int(opts["seed"]))
    _emit_json({"config": config,
                "results": {"class": desc, "gamma": rep.gamma,
                            "lower_form": rep.lower_form, "upper_form": rep.upper_form,
                            "ratio_lower": rep.ratio_lower, "ratio_upper": rep.ratio_upper,
                            "explicit_ok": rep.explicit_ok, "soft": rep.soft,
                            **rep.details}}, opts["out"])
    return 0 if rep.explicit_ok else CHECK_FAILURE


_BODIES = {
    "measures": _cmd_measures,
    "packing": _cmd_packing,
    "fixed-point": _cmd_fixed_point,
    "capacity": _cmd_capacity,
    "verify-lemmas": _cmd_verify_lemmas,
    "erm-run": _cmd_erm_run,
    "erm-sweep": _cmd_erm_sweep,
    "lower-bound-family": _cmd_lower_bound_family,
    "star-theorem": _cmd_star_theorem,
    "sandwich": _cmd_sandwich,
}


def _add_options(parser: argparse.ArgumentParser, sub: str) -> None:
    parser.add_argument("--config", default=None, help="INI config file")
    for key in _OPTION_DEFAULTS[sub]:
        flag = "--" + key.replace("_", "-")
        parser.add_argument(flag, default=None)


def dispatch(argv) -> int:
    parser = _Parser(prog="locent", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for sub in _OPTION_DEFAULTS:
        _add_options(subs.add_parser(sub, prog=f"locent {sub}"), sub)
    rp = subs.add_parser("replay", prog="locent replay")
    rp.add_argument("artifact")
    rp.add_argument("--out", default=None)

    ns = parser.parse_args(argv)
    if ns.subcommand == "replay":
        return _replay(ns.artifact, ns.out)
    cli_args = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "config")}
    try:
        opts = _resolve(ns.subcommand, cli_args, ns.config)
        config = {"subcommand": ns.subcommand,
                  "args": {k: v for k, v in sorted(opts.items()) if k != "out"}}
        return _BODIES[ns.subcommand](opts, config)
    except (ValueError, FileNotFoundError, classes.ClassFormatError,
            classes.PatternCountError) as exc:
        sys.stderr.write(f"locent {ns.subcommand}: error: {exc}\n")
        return USAGE_ERROR


def _replay(artifact_path: str, out: str | None) -> int:
    """Regenerate an artifact from its embedded configuration."""
    with open(artifact_path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if first.startswith("# config "):
            config = json.loads(first[len("# config "):])
        else:
            fh.seek(0)
            config = json.load(fh)["config"]
    sub = config["subcommand"]
    opts = dict(_OPTION_DEFAULTS[sub])
    opts.update(config["args"])
    opts["out"] = out
    run_config = {"subcommand": sub,
                  "args": {k: v for k, v in sorted(opts.items()) if k != "out"}}
    return _BODIES[sub](opts, run_config)


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
