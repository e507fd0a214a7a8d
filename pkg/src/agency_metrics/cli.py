"""Command-line front end.

Every run resolves one flat configuration (the ``DEFAULTS`` table overlaid
with ``--config`` and ``--set`` values), executes exactly one command and
writes a JSON report or a CSV table.
"""

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .agency import AgencyWeights, empowerment, empowerment_map, ideal_agency_reward
from .convergence import NetworkShape, RateQuery, convergence_report
from .exceptions import AgencyMetricsError, ValidationError
from .information import blahut_arimoto, curiosity_kl
from .mdp import make_gridworld, make_random_mdp
from .measure import FunctionCube, epsilon_tube_measure, monte_carlo_measure, subspace_projection
from .serialization import (
    dumps,
    load_basis,
    load_belief,
    load_channel,
    load_cube,
    load_distribution,
    load_json,
    load_mdp,
    load_reward,
)
from .starc import StarcConfig, starc_report

COMMANDS = (
    "curiosity",
    "empowerment",
    "agency-reward",
    "starc-distance",
    "agency-metric",
    "measure",
    "convergence",
    "rates",
)

# single source of truth for every tunable value; keys are ``section.name``
DEFAULTS = {
    "inputs.mdp": None,
    "inputs.reward_f": None,
    "inputs.reward_a": None,
    "inputs.belief": None,
    "inputs.mesa": None,
    "inputs.p": None,
    "inputs.q": None,
    "inputs.channel": None,
    "inputs.cube": None,
    "inputs.basis": None,
    "env.kind": "gridworld",
    "env.width": 3,
    "env.height": 3,
    "env.slip": 0.0,
    "env.num_states": 4,
    "env.num_actions": 2,
    "env.sparsity": 0.0,
    "env.discount": 0.9,
    "curiosity.p": None,
    "curiosity.q": None,
    "curiosity.smoothing": 0.0,
    "curiosity.base": "nats",
    "empowerment.state": 0,
    "empowerment.horizon": 1,
    "empowerment.tol": 1e-9,
    "empowerment.max_iter": 100000,
    "empowerment.cap": 4096,
    "empowerment.base": "bits",
    "empowerment.all_states": False,
    "agency.alpha": 1.0,
    "agency.beta": 1.0,
    "agency.gamma_mesa": 0.0,
    "agency.horizon": 1,
    "agency.smoothing": 1e-9,
    "agency.tol": 1e-9,
    "agency.cap": 4096,
    "agency.base": "bits",
    "agency.empowerment_at": "successor",
    "starc.canonical_policy": "uniform",
    "starc.normalizer": "L2",
    "starc.distance": "L2",
    "starc.weighting": "transition_weighted",
    "starc.tol": 1e-9,
    "measure.n": 3,
    "measure.bound_m": 1.0,
    "measure.epsilon": 0.1,
    "measure.log10_epsilon": None,
    "measure.f_ideal": None,
    "measure.samples": 0,
    "measure.chunk_size": 65536,
    "convergence.depth_l": 20,
    "convergence.params_n": 1e10,
    "convergence.log10_params_n": None,
    "convergence.nc_base": "natural",
    "rates.dim_d": 1e6,
    "rates.sparsity_s": 10.0,
    "rates.iterations_t": 100.0,
}

SECTIONS = {
    "curiosity": ("inputs", "curiosity"),
    "empowerment": ("inputs", "env", "empowerment"),
    "agency-reward": ("inputs", "env", "agency"),
    "starc-distance": ("inputs", "env", "starc"),
    "agency-metric": ("inputs", "env", "agency", "starc"),
    "measure": ("inputs", "measure"),
    "convergence": ("convergence",),
    "rates": ("rates",),
}

EXIT_CODES_HELP = """\
exit codes:
  0   success
  1   unexpected internal error
  2   command-line usage error
  3   input file not found
  4   input file could not be parsed
  5   validation error (invariant violated, unknown key, bad value)
  6   dimension error (shapes disagree)
  7   singularity error (KL divergence infinite, smoothing needed)
  8   domain error (argument outside a closed-form bound's domain)
  9   resource error (empowerment enumeration cap exceeded)
  10  iteration-limit error (solver did not certify its tolerance)
"""


def _flatten(mapping, prefix=""):
    out = {}
    for key, value in mapping.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        else:
            out[name] = value
    return out


def parse_value(text):
    """``--set`` values are JSON when they parse as JSON, plain strings otherwise."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_assignment(text):
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise ValidationError(f"expected key=value, got {text!r}")
    return key.strip(), parse_value(value)


def resolve_config(overrides):
    unknown = sorted(set(overrides) - set(DEFAULTS))
    if unknown:
        raise ValidationError(f"unknown configuration keys: {', '.join(unknown)}")
    config = dict(DEFAULTS)
    config.update(overrides)
    return config


def _section(config, name):
    prefix = name + "."
    return {k[len(prefix):]: v for k, v in config.items() if k.startswith(prefix)}


def build_mdp(config, seed):
    if config["inputs.mdp"]:
        return load_mdp(config["inputs.mdp"])
    env = _section(config, "env")
    if env["kind"] == "gridworld":
        return make_gridworld(env["width"], env["height"], env["slip"], env["discount"])
    if env["kind"] == "random":
        return make_random_mdp(seed, env["num_states"], env["num_actions"],
                               env["sparsity"], env["discount"])
    raise ValidationError(f"env.kind must be 'gridworld' or 'random', got {env['kind']!r}")


def _required_input(config, role):
    path = config[f"inputs.{role}"]
    if not path:
        raise ValidationError(f"command needs inputs.{role}")
    return path


def _distribution(config, role):
    if config[f"inputs.{role}"]:
        return load_distribution(config[f"inputs.{role}"])
    inline = config[f"curiosity.{role}"]
    if inline is None:
        raise ValidationError(f"give inputs.{role} or curiosity.{role}")
    return np.asarray(inline, dtype=float)


def _weights(config):
    agency = _section(config, "agency")
    return AgencyWeights(agency["alpha"], agency["beta"], agency["gamma_mesa"])


def _ideal_reward(config, mdp):
    agency = _section(config, "agency")
    belief = (load_belief(config["inputs.belief"], mdp) if config["inputs.belief"]
              else mdp.transition)
    mesa = load_reward(config["inputs.mesa"], mdp) if config["inputs.mesa"] else None
    return ideal_agency_reward(
        mdp, belief, _weights(config), agency["horizon"], mesa,
        smoothing=agency["smoothing"], tol=agency["tol"], cap=agency["cap"],
        base=agency["base"], empowerment_at=agency["empowerment_at"],
    )


def _starc_config(config):
    starc = _section(config, "starc")
    return StarcConfig(starc["canonical_policy"], starc["normalizer"],
                       starc["distance"], starc["weighting"], starc["tol"])


def _run_curiosity(config, seed):
    c = _section(config, "curiosity")
    p, q = _distribution(config, "p"), _distribution(config, "q")
    kl = curiosity_kl(p, q, c["smoothing"], c["base"])
    return {"kl": kl, "base": c["base"], "smoothing": c["smoothing"]}


def _run_empowerment(config, seed):
    e = _section(config, "empowerment")
    if config["inputs.channel"]:
        result = blahut_arimoto(load_channel(config["inputs.channel"]), e["tol"],
                                e["max_iter"], e["base"])
        return result.to_dict()
    mdp = build_mdp(config, seed)
    result = empowerment(mdp, e["state"], e["horizon"], e["tol"], e["cap"],
                         e["max_iter"], e["base"])
    out = result.to_dict()
    out.update(state=e["state"], horizon=e["horizon"])
    if e["all_states"]:
        out["per_state"] = empowerment_map(mdp, e["horizon"], e["tol"], e["cap"], e["base"]).tolist()
    return out


def _run_agency_reward(config, seed):
    mdp = build_mdp(config, seed)
    reward = _ideal_reward(config, mdp)
    return {"values": reward.tolist(), "base": config["agency.base"]}


def _run_starc(config, seed):
    mdp = build_mdp(config, seed)
    reward_f = load_reward(_required_input(config, "reward_f"), mdp)
    reward_a = load_reward(_required_input(config, "reward_a"), mdp)
    return starc_report(reward_f, reward_a, mdp, _starc_config(config)).to_dict()


def _run_agency_metric(config, seed):
    mdp = build_mdp(config, seed)
    candidate = load_reward(_required_input(config, "reward_f"), mdp)
    ideal = _ideal_reward(config, mdp)
    return starc_report(candidate, ideal, mdp, _starc_config(config)).to_dict()


def _cube(config):
    if config["inputs.cube"]:
        return load_cube(config["inputs.cube"])
    m = _section(config, "measure")
    eps, log_eps = m["epsilon"], m["log10_epsilon"]
    if log_eps is not None:
        eps = None
    if m["f_ideal"] is None:
        return FunctionCube.centered(m["n"], m["bound_m"], eps, log_eps)
    return FunctionCube(m["f_ideal"], m["bound_m"], eps, log_eps)


def _run_measure(config, seed):
    m = _section(config, "measure")
    cube = _cube(config)
    out = epsilon_tube_measure(cube).to_dict()
    if m["samples"]:
        mc = monte_carlo_measure(cube, m["samples"], seed, m["chunk_size"])
        out["monte_carlo"] = mc.to_dict()
    if config["inputs.basis"]:
        basis, target = load_basis(config["inputs.basis"])
        out["projection"] = subspace_projection(basis, target).to_dict()
    return out


def _run_convergence(config, seed):
    c = _section(config, "convergence")
    if c["log10_params_n"] is not None:
        shape = NetworkShape(c["depth_l"], c["log10_params_n"])
    else:
        shape = NetworkShape.from_params(c["depth_l"], c["params_n"])
    return convergence_report(shape, c["nc_base"])


def _run_rates(config, seed):
    r = _section(config, "rates")
    return convergence_report(query=RateQuery(r["dim_d"], r["sparsity_s"], r["iterations_t"]))


RUNNERS = {
    "curiosity": _run_curiosity,
    "empowerment": _run_empowerment,
    "agency-reward": _run_agency_reward,
    "starc-distance": _run_starc,
    "agency-metric": _run_agency_metric,
    "measure": _run_measure,
    "convergence": _run_convergence,
    "rates": _run_rates,
}


def execute(command, config, seed=0, timestamp=True):
    """Run one command and return its report document."""
    if command not in RUNNERS:
        raise ValidationError(f"unknown command {command!r}")
    seed = _check_seed(seed)
    results = RUNNERS[command](config, seed)
    report = {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "results": results,
    }
    if timestamp:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return report


def _check_seed(seed):
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ValidationError(f"seed must be an integer, got {seed!r}") from None
    if not 0 <= seed < 2 ** 64:
        raise ValidationError("seed must be a 64-bit unsigned integer")
    return seed


def _scalar_columns(results, prefix=""):
    columns = {}
    for k, v in results.items():
        if isinstance(v, dict):
            columns.update(_scalar_columns(v, f"{prefix}{k}."))
        elif isinstance(v, (bool, int, float, str)) or v is None:
            columns[prefix + k] = v
    return columns


def format_cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return ""
    return str(value)


def emit_sweep(command, config, key, values, seed=0):
    """One CSV row per swept value; columns are the key and the scalar results."""
    if key not in DEFAULTS or key.split(".")[0] not in SECTIONS.get(command, ()):
        raise ValidationError(f"{key!r} is not a parameter of command {command!r}")
    rows = []
    for value in values:
        run_config = dict(config)
        run_config[key] = value
        results = execute(command, run_config, seed, timestamp=False)["results"]
        rows.append({key: value, **_scalar_columns(results)})
    return rows_to_csv(rows)


def rows_to_csv(rows):
    header = []
    for row in rows:
        header.extend(k for k in row if k not in header)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(row.get(k)) for k in header])
    return buffer.getvalue()


def _load_config_file(path):
    data = load_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    command = data.get("command")
    seed = data.get("seed")
    body = data.get("config", {k: v for k, v in data.items() if k not in ("command", "seed")})
    if not isinstance(body, dict):
        raise ValidationError(f"{path}: 'config' must be a JSON object")
    return command, seed, _flatten(body)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="agency-metrics",
        description="Curiosity, empowerment, reward-distance and function-space measure reports.",
        epilog=EXIT_CODES_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", nargs="?", choices=COMMANDS,
                        help="command to run (may also come from --config)")
    parser.add_argument("--config", help="JSON config, or an earlier report to re-run")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one dotted config key (repeatable)")
    parser.add_argument("--seed", type=int, help="64-bit unsigned seed (default 0)")
    parser.add_argument("--output", help="write the report here instead of stdout")
    parser.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp so identical runs give identical bytes")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--sweep", metavar="KEY=V1,V2,...",
                        help="rerun the command once per value and emit a table")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def _parse_sweep(text):
    key, sep, values = text.partition("=")
    if not sep or not values:
        raise ValidationError(f"--sweep expects KEY=V1,V2,..., got {text!r}")
    return key.strip(), [parse_value(v.strip()) for v in values.split(",")]


def run(argv=None):
    args = build_parser().parse_args(argv)
    command, file_seed, overrides = None, None, {}
    if args.config:
        command, file_seed, overrides = _load_config_file(args.config)
    command = args.command or command
    if command not in COMMANDS:
        raise ValidationError("no command given (positional argument or 'command' in --config)")
    for assignment in args.overrides:
        key, value = parse_assignment(assignment)
        overrides[key] = value
    config = resolve_config(overrides)
    seed = args.seed if args.seed is not None else (file_seed if file_seed is not None else 0)
    seed = _check_seed(seed)

    if args.sweep:
        key, values = _parse_sweep(args.sweep)
        if args.format == "csv":
            text = emit_sweep(command, config, key, values, seed)
        else:
            rows = []
            for value in values:
                run_config = dict(config, **{key: value})
                rows.append({"value": value,
                             "results": execute(command, run_config, seed, False)["results"]})
            report = {"command": command, "config": config, "seed": seed,
                      "version": __version__, "sweep": {"key": key, "rows": rows}}
            if not args.no_timestamp:
                report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
            text = dumps(report)
    else:
        report = execute(command, config, seed, timestamp=not args.no_timestamp)
        if args.format == "csv":
            text = rows_to_csv([_scalar_columns(report["results"])])
        else:
            text = dumps(report)

    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None):
    try:
        return run(argv)
    except AgencyMetricsError as exc:
        sys.stderr.write(json.dumps(exc.to_dict(), sort_keys=True) + "\n")
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - last-resort machine-readable error
        sys.stderr.write(json.dumps({"error": "internal_error", "message": repr(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
