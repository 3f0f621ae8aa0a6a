"""Command line interface.

Every subcommand accepts ``--config FILE`` (YAML mapping of option names to
values).  Precedence is built-in defaults < config file < explicit flags.
Unknown config keys are rejected before any computation starts.  Each run
writes ``manifest.json`` (resolved options, seed, version, input digests)
next to its outputs.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 internal error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import numpy as np

from . import __version__
from . import diagnostics as dg
from ._jit import backend
from .errors import ConfigError, DataError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

OUT_ENV = "CCMNET_OUTPUT_DIR"

log = logging.getLogger("ccmnet")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _floats(text):
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    try:
        return tuple(int(v) for v in str(text).split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


# -- option tables ---------------------------------------------------------------
# name -> (default, type, help).  ``type`` also coerces config-file values.

COMMON = {
    "seed": (0, int, "master random seed"),
    "workers": (1, int, "parallel worker processes (results do not depend on it)"),
    "out": (None, str, f"output directory (default ${OUT_ENV} or ./ccmnet-out)"),
}

OPTIONS = {
    "generate": {
        "n": (100, int, "number of nodes"),
        "mapping": ("degree", str, "degree or mixing"),
        "law": ("parametric", str, "parametric or uniform"),
        "nb": ((1.02, 6.19), _floats, "NB size,mu for the degree law"),
        "theta_file": (None, str, "degree probabilities, one per line (overrides --nb)"),
        "labels": (None, str, "node,label file for the mixing mapping"),
        "class_sizes": (None, _ints, "class sizes for the mixing mapping (alternative to --labels)"),
        "lam": (50.0, float, "Poisson mean edge count (mixing)"),
        "alpha": (None, _floats, "cell probabilities, upper triangle row-major (mixing)"),
        "count_method": ("bc", str, "graph-count estimator: bc or mw"),
        "networks": (1000, int, "number of retained networks"),
        "burn_in": (None, int, "burn-in proposals (default 20 sweeps over all dyads)"),
        "thin": (None, int, "proposals between retained networks (default one sweep)"),
        "tnt_edge_prob": (0.5, float, "tie/no-tie edge-branch probability"),
        "paper_faithful_acceptance": (False, bool, "drop the proposal-ratio correction"),
    },
    "infer": {
        "edges": (None, str, "observed edge list"),
        "mask": (None, str, "sampled-node file"),
        "labels": (None, str, "node,label file (mixing mapping)"),
        "mapping": ("degree", str, "degree or mixing"),
        "count_method": ("bc", str, "graph-count estimator: bc or mw"),
        "outer_iterations": (1000, int, "Gibbs iterations"),
        "outer_burn_in": (100, int, "iterations discarded before summaries"),
        "inner_sweep_factor": (1.0, float, "MH proposals per iteration, in units of unknown dyads"),
        "tnt_edge_prob": (0.5, float, "tie/no-tie edge-branch probability"),
        "paper_faithful_acceptance": (False, bool, "drop the proposal-ratio correction"),
        "dirichlet_alpha0": (1e-4, float, "Dirichlet prior concentration per cell"),
        "gamma_shape": (1e-3, float, "Gamma prior shape for lambda"),
        "gamma_rate": (1e-3, float, "Gamma prior rate for lambda"),
        "checkpoint": (None, str, "checkpoint file rewritten every iteration"),
        "resume": (None, str, "checkpoint to resume from"),
        "plot": (False, bool, "write trace SVGs"),
    },
    "simulate": {
        "profile": ("desk", str, "desk or paper"),
        "scenario": ("degree", str, "degree, mixing or illustration"),
        "n": (None, int, "number of nodes (profile default)"),
        "fractions": (None, _floats, "sampling fractions (profile default)"),
        "replications": (None, int, "replications per fraction (profile default)"),
        "outer_iterations": (1000, int, "Gibbs iterations"),
        "outer_burn_in": (100, int, "iterations discarded before summaries"),
        "inner_sweep_factor": (1.0, float, "MH proposals per iteration, in units of unknown dyads"),
        "count_method": ("bc", str, "graph-count estimator: bc or mw"),
        "dirichlet_alpha0": (1e-4, float, "Dirichlet prior concentration per cell"),
        "truth_sweeps": (20.0, float, "sweeps used to draw each truth network"),
        "class_sizes": ((100, 100), _ints, "class sizes (mixing scenario)"),
        "lam": (300.0, float, "Poisson mean edge count (mixing scenario)"),
        "alpha": ((0.4, 0.2, 0.4), _floats, "cell probabilities (mixing scenario)"),
        "class_fractions": (None, _floats, "per-class sampling fractions (mixing scenario)"),
        "infer": (True, bool, "run inference in the mixing scenario (off: truth and complete case only)"),
        "samples": (5000, int, "networks per source (illustration)"),
        "plot": (True, bool, "write SVG figures"),
    },
    "wphi-study": {
        "kind": ("mixing", str, "degree or mixing"),
        "n": (None, int, "network size (default 10 degree, 50 mixing)"),
        "class_sizes": (None, _ints, "class sizes (default even split)"),
        "method": ("sample", str, "sample or exact (exact: mixing only)"),
        "draws": (20000, int, "retained networks in the harvesting chain"),
        "burn_in": (100000, int, "burn-in proposals"),
        "thin": (1000, int, "proposals between retained networks"),
        "base": (None, float, "theta1 mean: mu (degree, default 3) or lambda (mixing, default 50)"),
        "deltas": ((0.1, -0.1, 0.2, -0.2), _floats, "relative changes of the mean"),
    },
    "realize-mm": {
        "matrix": (None, str, "symmetric mixing matrix, comma-delimited rows"),
        "class_sizes": (None, _ints, "class sizes"),
        "method": ("direct", str, "direct, removal or random"),
    },
    "ingest-vgl": {
        "fasta": (None, str, "aligned sequences"),
        "attrs": (None, str, "id,label,sequenced attribute file"),
        "threshold": (0.015, float, "TN93 linkage threshold"),
        "policy": ("skip", str, "ambiguous-site policy: skip or resolve"),
    },
    "diagnose": {
        "chain": (None, str, "posterior chain CSV"),
        "burn_in": (0, int, "rows to discard"),
        "params": (None, str, "comma-separated columns (default all theta columns)"),
        "first_frac": (0.1, float, "Geweke first window fraction"),
        "last_frac": (0.5, float, "Geweke last window fraction"),
        "min_variance": (dg.MIN_VARIANCE, float, "variance below which a chain is not computable"),
        "plot": (True, bool, "write trace SVGs"),
    },
}

REQUIRED = {
    "infer": ("edges", "mask"),
    "realize-mm": ("matrix", "class_sizes"),
    "ingest-vgl": ("fasta",),
    "diagnose": ("chain",),
}

HELP = {
    "generate": "sample networks from a CCM",
    "infer": "Gibbs inference on a partially observed network",
    "simulate": "simulation studies (degree recovery, mixing recovery, illustration)",
    "wphi-study": "normalizing-mass stability study",
    "realize-mm": "realize a mixing matrix as a network",
    "ingest-vgl": "build a linkage network from aligned sequences",
    "diagnose": "convergence diagnostics for a chain CSV",
}


def _bool(text):
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser():
    p = _Parser(prog="ccmnet", description="Congruence class models for partially observed networks.")
    p.add_argument("--version", action="version", version=f"ccmnet {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name, opts in OPTIONS.items():
        sp = sub.add_parser(name, help=HELP[name], description=HELP[name],
                            argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="YAML file of option values (flags override it)")
        sp.add_argument("-v", "--verbose", action="store_true")
        for key, (default, typ, text) in {**opts, **COMMON}.items():
            flag = "--" + key.replace("_", "-")
            shown = "" if default is None else f" [default: {_show(default)}]"
            if typ is bool:
                sp.add_argument(flag, type=_bool, nargs="?", const=True, help=text + shown)
            else:
                sp.add_argument(flag, type=typ, help=text + shown)
    return p


def _show(v):
    if isinstance(v, tuple):
        return ",".join(str(x) for x in v)
    return str(v)


def load_config(path, command):
    import yaml

    try:
        with open(path) as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc.__class__.__name__})") from None
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    table = {**OPTIONS[command], **COMMON}
    out = {}
    for raw, value in doc.items():
        key = str(raw).replace("-", "_")
        if key not in table:
            raise ConfigError(f"{path}: unknown key {raw!r} for {command}")
        out[key] = _coerce(value, table[key][1], raw)
    return out


def _coerce(value, typ, name):
    if value is None:
        return None
    try:
        if typ is bool:
            return _bool(value)
        if typ in (_floats, _ints) and isinstance(value, (list, tuple)):
            return typ(",".join(str(v) for v in value))
        return typ(value)
    except (argparse.ArgumentTypeError, TypeError, ValueError):
        raise ConfigError(f"bad value for {name!r}: {value!r}") from None


def resolve(command, ns):
    """Merge defaults, config file and explicit flags into one dict."""
    table = {**OPTIONS[command], **COMMON}
    opts = {k: v[0] for k, v in table.items()}
    if getattr(ns, "config", None):
        opts.update(load_config(ns.config, command))
    for k in table:
        if hasattr(ns, k):
            opts[k] = getattr(ns, k)
    for k in REQUIRED.get(command, ()):
        if opts.get(k) is None:
            raise UsageError(f"ccmnet {command}: --{k.replace('_', '-')} is required")
    if opts["out"] is None:
        opts["out"] = os.environ.get(OUT_ENV) or "ccmnet-out"
    if opts["workers"] is None or opts["workers"] < 1:
        opts["workers"] = os.cpu_count() or 1
    return opts


def _digests(paths):
    from .graph import file_digest

    return {p: file_digest(p) for p in paths if p}


def write_manifest(command, opts, inputs, outputs):
    """Deterministic run record: no timestamps, no output path."""
    cfg = {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(opts.items())
           if k not in ("out", "workers")}
    doc = {
        "command": command,
        "version": __version__,
        "backend": backend(),
        "seed": opts.get("seed"),
        "config": cfg,
        "inputs": {os.path.basename(k): v for k, v in sorted(_digests(inputs).items())},
        "outputs": sorted(outputs),
    }
    with open(os.path.join(opts["out"], "manifest.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- subcommands --------------------------------------------------------------------

def _classification(opts, n=None):
    from .graph import NodeClassification, read_node_labels

    if opts.get("labels"):
        c, _ = read_node_labels(opts["labels"], n)
        return c
    if opts.get("class_sizes"):
        return NodeClassification.from_sizes(opts["class_sizes"])
    raise UsageError("the mixing mapping needs --labels or --class-sizes")


def _check_choice(name, value, choices):
    if value not in choices:
        raise ConfigError(f"{name} must be one of {', '.join(choices)} (got {value!r})")


def cmd_generate(opts):
    from .graph import n_dyads, write_edge_list
    from .harness import build_nb_theta
    from .model import CcmSpec, CongruenceMapping, MultinomialDegree, PoissonMultinomialMixing, Uniform
    from .sampler import SamplerConfig, mh_run
    from .graph import Network

    _check_choice("mapping", opts["mapping"], ("degree", "mixing"))
    _check_choice("law", opts["law"], ("parametric", "uniform"))
    if opts["mapping"] == "degree":
        n = opts["n"]
        mapping = CongruenceMapping.degree(opts["count_method"])
        if opts["law"] == "uniform":
            law = Uniform()
        elif opts["theta_file"]:
            theta = np.loadtxt(opts["theta_file"], dtype=float, ndmin=1)
            if len(theta) != n:
                raise DataError(f"{opts['theta_file']}: {len(theta)} probabilities for n={n}")
            law = MultinomialDegree(theta / theta.sum())
        else:
            size, mu = opts["nb"]
            law = MultinomialDegree(build_nb_theta(size, mu, n))
    else:
        c = _classification(opts)
        n = c.n
        mapping = CongruenceMapping.mixing(c)
        if opts["law"] == "uniform":
            law = Uniform()
        else:
            k = c.q * (c.q + 1) // 2
            alpha = opts["alpha"] or tuple([1.0 / k] * k)
            law = PoissonMultinomialMixing(opts["lam"], np.asarray(alpha) / np.sum(alpha))
    spec = CcmSpec(mapping, law)
    burn = opts["burn_in"] if opts["burn_in"] is not None else 20 * n_dyads(n)
    thin = opts["thin"] if opts["thin"] is not None else n_dyads(n)
    cfg = SamplerConfig(burn + opts["networks"] * thin, burn, thin, opts["tnt_edge_prob"], opts["seed"],
                        opts["paper_faithful_acceptance"])
    stream = mh_run(spec, Network(n), cfg)
    out = opts["out"]
    stream.to_csv(os.path.join(out, "samples.csv"))
    write_edge_list(stream.final_state.network(), os.path.join(out, "network.txt"))
    log.info("acceptance rate %.4f", stream.acceptance_rate)
    return [opts["theta_file"], opts["labels"]], ["samples.csv", "network.txt"]


def cmd_infer(opts):
    from .gibbs import GibbsConfig, gibbs_run, summarize
    from .graph import read_edge_list, read_mask
    from .model import CcmSpec, CongruenceMapping, MultinomialDegree, PoissonMultinomialMixing, PriorSpec

    _check_choice("mapping", opts["mapping"], ("degree", "mixing"))
    g_o = read_edge_list(opts["edges"])
    mask = read_mask(opts["mask"], g_o.n)
    prior = PriorSpec(opts["dirichlet_alpha0"], opts["gamma_shape"], opts["gamma_rate"])
    if opts["mapping"] == "degree":
        n = g_o.n
        spec = CcmSpec(CongruenceMapping.degree(opts["count_method"]), MultinomialDegree(np.full(n, 1.0 / n)), prior)
    else:
        if not opts["labels"]:
            raise UsageError("ccmnet infer: the mixing mapping needs --labels")
        c = _classification(opts, g_o.n)
        k = c.q * (c.q + 1) // 2
        spec = CcmSpec(CongruenceMapping.mixing(c), PoissonMultinomialMixing(1.0, np.full(k, 1.0 / k)), prior)
    cfg = GibbsConfig(opts["outer_iterations"], opts["outer_burn_in"], opts["inner_sweep_factor"],
                      opts["seed"], opts["tnt_edge_prob"], opts["paper_faithful_acceptance"])
    res = gibbs_run(g_o, mask, spec, cfg, checkpoint=opts["checkpoint"], resume=opts["resume"])
    out = opts["out"]
    res.to_csv(os.path.join(out, "chain.csv"))
    burn = min(cfg.outer_burn_in, len(res) - 1) if opts["resume"] is None else 0
    sm = summarize(res, burn)
    from .harness import write_rows

    rows = []
    for k, name in enumerate(res.theta_columns):
        rows.append([name, sm.param_mean[k]] + [float(v) for v in sm.param_quantiles[:, k]])
    for k, name in enumerate(res.stat_columns):
        rows.append([name, sm.stat_mean[k]] + [float(v) for v in sm.stat_quantiles[:, k]])
    write_rows(os.path.join(out, "summary.csv"), ["param", "mean", "q025", "q50", "q975"], rows)
    chains = {name: res.theta[burn:, k] for k, name in enumerate(res.theta_columns)}
    dg.trace_report(chains, out, plot=opts["plot"])
    outputs = ["chain.csv", "summary.csv", "diagnostics.csv"]
    return [opts["edges"], opts["mask"], opts["labels"], opts["resume"]], outputs


def cmd_simulate(opts):
    from . import harness as H
    from .gibbs import GibbsConfig
    from .model import PriorSpec

    _check_choice("profile", opts["profile"], tuple(H.PROFILES))
    _check_choice("scenario", opts["scenario"], ("degree", "mixing", "illustration"))
    kind = {"degree": H.DEGREE_RECOVERY, "mixing": H.MIXING_RECOVERY, "illustration": H.ILLUSTRATION}
    over = dict(
        kind=kind[opts["scenario"]], seed=opts["seed"], count_method=opts["count_method"],
        truth_sweeps=opts["truth_sweeps"], prior=PriorSpec(opts["dirichlet_alpha0"]),
        gibbs=GibbsConfig(opts["outer_iterations"], opts["outer_burn_in"], opts["inner_sweep_factor"]),
        class_sizes=tuple(opts["class_sizes"]), lam=opts["lam"], alpha=tuple(opts["alpha"]),
        class_fractions=tuple(opts["class_fractions"] or ()), infer=opts["infer"], n_samples=opts["samples"],
    )
    for k in ("n", "fractions", "replications"):
        if opts[k] is not None:
            over[k] = tuple(opts[k]) if k == "fractions" else opts[k]
    if opts["scenario"] == "illustration" and opts["n"] is None:
        over["n"] = 100
    if opts["scenario"] == "mixing" and opts["n"] is None:
        over["n"] = int(sum(over["class_sizes"]))
    plan = H.plan_from_profile(opts["profile"], **over)
    out = opts["out"]
    if plan.kind == H.DEGREE_RECOVERY:
        res = H.run_degree_recovery(plan, opts["workers"])
        H.write_degree_outputs(res, out, plot=opts["plot"])
        files = ["results.csv", "summary.csv", "diagnostics.csv", "estimates.csv"]
    elif plan.kind == H.MIXING_RECOVERY:
        res = H.run_mixing_recovery(plan, opts["workers"])
        H.write_mixing_outputs(res, plan, out)
        files = ["mixing.csv"]
    else:
        ccm, mult, rows = H.run_illustration(plan)
        H.write_illustration_outputs(ccm, mult, rows, out, plot=opts["plot"])
        files = ["illustration_tests.csv", "illustration_samples.csv"]
    return [], files


def cmd_wphi(opts):
    from .graph import NodeClassification
    from .model import CongruenceMapping
    from .sampler import SamplerConfig
    from . import wphi as W

    _check_choice("kind", opts["kind"], ("degree", "mixing"))
    _check_choice("method", opts["method"], ("sample", "exact"))
    kind = opts["kind"]
    n = opts["n"] or (10 if kind == "degree" else 50)
    base = opts["base"] or (3.0 if kind == "degree" else 50.0)
    sizes = opts["class_sizes"] or (n // 2, n - n // 2)
    if kind == "mixing" and sum(sizes) != n:
        raise ConfigError("class sizes must add up to n")
    sample = None
    if opts["method"] == "sample":
        mapping = (CongruenceMapping.degree() if kind == "degree"
                   else CongruenceMapping.mixing(NodeClassification.from_sizes(sizes)))
        cfg = SamplerConfig(opts["burn_in"] + opts["draws"] * opts["thin"], opts["burn_in"], opts["thin"],
                            seed=opts["seed"])
        sample = W.harvest_unique_classes(mapping, n, cfg)
        log.info("%d unique classes from %d draws", len(sample), sample.n_draws)
    elif kind == "degree":
        raise ConfigError("the exact method is only available for the mixing mapping")
    rep = W.perturbation_table(kind, base, opts["deltas"], sample=sample, n=n, class_sizes=sizes)
    rep.to_csv(os.path.join(opts["out"], "wphi.csv"))
    files = ["wphi.csv"]
    if sample is not None:
        from .harness import write_rows

        write_rows(os.path.join(opts["out"], "classes.csv"), ["n_unique", "n_draws"],
                   [[len(sample), sample.n_draws]])
        files.append("classes.csv")
    return [], files


def cmd_realize(opts):
    from .graph import write_edge_list, write_node_labels
    from .graphical import MmTarget, realize

    _check_choice("method", opts["method"], ("direct", "removal", "random"))
    try:
        mat = np.loadtxt(opts["matrix"], delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read matrix {opts['matrix']}: {exc}") from None
    t = MmTarget(np.asarray(opts["class_sizes"]), mat)
    g, c = realize(t, opts["method"], opts["seed"])
    write_edge_list(g, os.path.join(opts["out"], "network.txt"))
    write_node_labels(c, os.path.join(opts["out"], "labels.csv"))
    return [opts["matrix"]], ["network.txt", "labels.csv"]


def cmd_ingest(opts):
    from .graph import write_edge_list, write_mask
    from .harness import write_rows
    from .vgl import build_vgl_network, read_attributes, read_fasta

    _check_choice("policy", opts["policy"], ("skip", "resolve"))
    records = read_fasta(opts["fasta"])
    attrs = read_attributes(opts["attrs"]) if opts["attrs"] else None
    v = build_vgl_network(records, opts["threshold"], attrs, opts["policy"])
    out = opts["out"]
    write_edge_list(v.network, os.path.join(out, "edges.txt"))
    write_mask(v.mask, os.path.join(out, "mask.txt"))
    write_rows(os.path.join(out, "labels.csv"), ["node", "label", "id"],
               [[k, v.label_names[v.classification.labels[k]], name] for k, name in enumerate(v.names)])
    write_rows(os.path.join(out, "ingest_report.csv"), ["n_nodes", "n_sequenced", "n_edges", "n_inestimable",
                                                        "n_unmatched"],
               [[v.network.n, len(records), v.network.n_edges, v.n_inestimable, len(v.unmatched)]])
    return [opts["fasta"], opts["attrs"]], ["edges.txt", "mask.txt", "labels.csv", "ingest_report.csv"]


def cmd_diagnose(opts):
    from .gibbs import read_chain_csv

    try:
        header, data = read_chain_csv(opts["chain"])
    except ValueError as exc:
        raise DataError(f"{opts['chain']}: not a numeric chain CSV ({exc})") from None
    if opts["params"]:
        params = [p.strip() for p in opts["params"].split(",") if p.strip()]
        missing = [p for p in params if p not in header]
        if missing:
            raise DataError(f"{opts['chain']}: no column(s) {', '.join(missing)}")
    else:
        params = [h for h in header if h.startswith(("theta_", "lambda", "alpha_"))]
    burn = opts["burn_in"]
    if burn >= len(data):
        raise DataError(f"burn-in {burn} leaves no rows of {len(data)}")
    chains = {p: data[burn:, header.index(p)] for p in params}
    dg.trace_report(chains, opts["out"], params, plot=opts["plot"], first_frac=opts["first_frac"],
                    last_frac=opts["last_frac"], min_variance=opts["min_variance"])
    return [opts["chain"]], ["diagnostics.csv"]


COMMANDS = {
    "generate": cmd_generate,
    "infer": cmd_infer,
    "simulate": cmd_simulate,
    "wphi-study": cmd_wphi,
    "realize-mm": cmd_realize,
    "ingest-vgl": cmd_ingest,
    "diagnose": cmd_diagnose,
}


def run(argv=None):
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if getattr(ns, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    opts = resolve(ns.command, ns)
    os.makedirs(opts["out"], exist_ok=True)
    inputs, outputs = COMMANDS[ns.command](opts)
    write_manifest(ns.command, opts, inputs, outputs)
    return EXIT_OK


def main(argv=None):
    try:
        return run(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        msg = exc if isinstance(exc, DataError) else f"{exc.strerror}: {exc.filename}"
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        print("error: interrupted", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc.__class__.__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
