"""Command line interface: ``qhc {validate,analyze,hidden,quantum,sample}``.

Every command prints one JSON report on stdout. Exit codes: 0 success,
1 I/O or parse failure, 2 domain or validation failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Sequence

import numpy as np

from qhc import classical, factorize, quantum, sampler
from qhc.errors import QHCError, ValidationError
from qhc.indexmap import Convention, IndexMap, enumerate_factorizations, parse_map_spec
from qhc.io import (
    FormatError,
    dumps,
    load_json,
    map_from_json,
    matrix_from_json,
    observable_from_json,
    state_from_json,
    write_text,
)

log = logging.getLogger("qhc")

EXIT_OK, EXIT_IO, EXIT_DOMAIN = 0, 1, 2


class CommandFailed(Exception):
    def __init__(self, code: int, report: dict[str, Any]):
        super().__init__(report.get("error", {}).get("message", ""))
        self.code = code
        self.report = report


def _map_from_args(args) -> IndexMap:
    if getattr(args, "map_file", None):
        return map_from_json(load_json(args.map_file))
    if not getattr(args, "map", None):
        raise ValidationError("map-spec", 0, "an index map is required (--map or --map-file)")
    return parse_map_spec(args.map, args.convention)


def _inequality_block(state: classical.ProbabilityState, imap: IndexMap, tol: float) -> dict[str, Any]:
    block: dict[str, Any] = {"map": imap.to_json()}
    ms = classical.marginals(state, imap)
    block["marginals"] = ms.as_lists()
    block["marginal_entropies"] = [classical.shannon_entropy(m) for m in ms.marginals]
    if imap.parts == 2:
        block["mutual_information"] = classical.mutual_information(state, imap)
        block["subadditivity"] = classical.check_subadditivity(state, imap, tol).to_dict()
    elif imap.parts == 3:
        block["strong_subadditivity"] = classical.check_strong_subadditivity(state, imap, tol).to_dict()
    return block


def cmd_validate(args) -> dict[str, Any]:
    doc = load_json(args.path)
    if not isinstance(doc, dict):
        raise FormatError("top-level JSON value must be an object")
    report: dict[str, Any] = {"command": "validate"}
    violations: list[tuple[str, float]] = []
    if "entries" in doc:
        m = matrix_from_json(doc)
        report["kind"] = "density-matrix"
        report["dim"] = int(m.shape[0])
        violations = quantum.density_violations(m)
    elif "probs" in doc:
        report["kind"] = "state"
        report["dim"] = len(doc["probs"])
        try:
            state_from_json(doc)
        except ValidationError as exc:
            violations = [(exc.condition, exc.magnitude)]
    elif "values" in doc:
        report["kind"] = "observable"
        report["dim"] = len(doc["values"])
        try:
            observable_from_json(doc)
        except ValidationError as exc:
            violations = [(exc.condition, exc.magnitude)]
    elif "factors" in doc:
        report["kind"] = "index-map"
        try:
            imap = map_from_json(doc)
            report["dim"] = imap.total
        except ValidationError as exc:
            violations = [(exc.condition, exc.magnitude)]
    else:
        raise FormatError('unrecognized document: expected "entries", "probs", "values" or "factors"')
    report["valid"] = not violations
    report["violations"] = [{"condition": c, "magnitude": float(v)} for c, v in violations]
    if violations:
        raise CommandFailed(EXIT_DOMAIN, report)
    return report


def cmd_analyze(args) -> dict[str, Any]:
    state = state_from_json(load_json(args.state))
    report: dict[str, Any] = {"command": "analyze", "N": state.dim,
                              "entropy": classical.shannon_entropy(state), "partitions": []}
    if args.all_partitions:
        maps = [IndexMap(f, Convention(args.convention)) for f in enumerate_factorizations(state.dim, args.parts)]
        if not maps:
            report["note"] = "no nontrivial partitions"
    else:
        maps = [_map_from_args(args)]
    report["partitions"] = [_inequality_block(state, m, args.ineq_tol) for m in maps]
    return report


def cmd_hidden(args) -> dict[str, Any]:
    state = state_from_json(load_json(args.state))
    obs = observable_from_json(load_json(args.observable))
    imap = _map_from_args(args)
    res = factorize.factor_classical_multi(obs, imap, args.tol) if imap.parts > 2 else \
        factorize.factor_classical(obs, imap, args.tol)
    report: dict[str, Any] = {"command": "hidden", "map": imap.to_json(),
                              "mean": classical.mean(state, obs), "factorization": res.to_json()}
    if not res.success:
        report["verdict"] = "not product-form under this map"
        return report
    report["verdict"] = "product-form"
    lifts = [classical.lift_factor(imap, p, f) for p, f in enumerate(res.factors, start=1)]
    report["lifted"] = [lift.values.tolist() for lift in lifts]
    lifted_product = np.prod([lift.values for lift in lifts], axis=0)
    corr = float(np.dot(state.probs, lifted_product))
    report["correlation"] = corr
    report["joint_correlation"] = classical.mean_as_correlation(state, imap, res.factors)
    report["difference"] = abs(report["mean"] - corr)
    return report


def _load_quantum_observable(path: str) -> quantum.QuantumObservable:
    doc = load_json(path)
    if isinstance(doc, dict) and "values" in doc:
        return quantum.QuantumObservable.diagonal(doc["values"])
    return quantum.QuantumObservable(matrix_from_json(doc))


def cmd_quantum(args) -> dict[str, Any]:
    rho = quantum.DensityMatrix(matrix_from_json(load_json(args.rho)))
    imap = _map_from_args(args)
    report: dict[str, Any] = {"command": "quantum", "map": imap.to_json(), "spin": rho.spin,
                              "entropy": quantum.von_neumann_entropy(rho)}
    if args.factor:
        factors = [_load_quantum_observable(p) for p in args.factor]
        direct = quantum.expectation(rho, quantum.kron(factors))
        lifted = quantum.mean_as_quantum_correlation(rho, imap, factors)
        report["trace_value"] = direct
        report["lifted_product_value"] = lifted
        report["difference"] = abs(direct - lifted)
        report["commutators"] = [{"pair": list(k), "max_abs": v}
                                 for k, v in quantum.lift_commutators(imap, factors).items()]
    if imap.parts >= 2:
        report["reduced_entropies"] = [quantum.von_neumann_entropy(quantum.partial_trace(rho, imap, [p]))
                                       for p in range(1, imap.parts + 1)]
    if imap.parts == 2:
        report["subadditivity"] = quantum.check_quantum_subadditivity(rho, imap, args.ineq_tol).to_dict()
    elif imap.parts == 3:
        report["strong_subadditivity"] = quantum.check_quantum_ssa(rho, imap, args.ineq_tol).to_dict()
    return report


def cmd_sample(args) -> dict[str, Any]:
    seed = sampler.default_seed() if args.seed is None else args.seed
    if (args.state is None) == (args.rho is None):
        raise ValidationError("input", 0, "give exactly one of --state or --rho")
    if args.state is not None:
        state = state_from_json(load_json(args.state))
        obs = observable_from_json(load_json(args.observable))
        rep = sampler.sample_classical(state, obs, args.L, seed)
        kind = "classical"
    else:
        rho = quantum.DensityMatrix(matrix_from_json(load_json(args.rho)))
        rep = sampler.sample_diagonal_quantum(rho, _load_quantum_observable(args.observable), args.L, seed)
        kind = "diagonal-quantum"
    return {"command": "sample", "kind": kind, **rep.to_dict()}


def _add_map_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--map", help="factor spec such as 2x2 or 2x2x2")
    p.add_argument("--convention", default="row-major", choices=[c.value for c in Convention if c.value != "explicit"])
    p.add_argument("--map-file", help="index map JSON (supports explicit tables)")


def _positive(text: str) -> float:
    val = float(text)
    if not val > 0:
        raise argparse.ArgumentTypeError("tolerances must be > 0")
    return val


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qhc", description=__doc__.splitlines()[0])
    parser.add_argument("-o", "--output", help="write the report here instead of stdout")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a state, observable, density matrix or index map file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", help="entropies, marginals and inequalities of a classical state")
    p.add_argument("state")
    _add_map_args(p)
    p.add_argument("--all-partitions", action="store_true", help="sweep every factorization of N")
    p.add_argument("--parts", type=int, default=2, help="number of factors for --all-partitions")
    p.add_argument("--ineq-tol", type=_positive, default=classical.INEQ_TOL)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("hidden", help="decompose a classical mean into hidden correlations")
    p.add_argument("state")
    p.add_argument("observable")
    _add_map_args(p)
    p.add_argument("--tol", type=_positive, default=factorize.DEFAULT_TOL)
    p.set_defaults(func=cmd_hidden)

    p = sub.add_parser("quantum", help="quantum correlation identity and entropies")
    p.add_argument("rho")
    p.add_argument("--factor", action="append", default=[], help="per-subsystem observable (repeat in order)")
    _add_map_args(p)
    p.add_argument("--ineq-tol", type=_positive, default=quantum.INEQ_TOL)
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("sample", help="simulate L repeated measurements")
    p.add_argument("--state")
    p.add_argument("--rho")
    p.add_argument("--observable", required=True)
    p.add_argument("-L", type=int, default=10_000)
    p.add_argument("--seed", type=lambda t: int(t, 0), default=None, help="defaults to $QHC_SEED or 0")
    p.set_defaults(func=cmd_sample)
    return parser


def _error_report(command: str, exc: BaseException, **extra) -> dict[str, Any]:
    err: dict[str, Any] = {"type": type(exc).__name__, "message": str(exc)}
    err.update(extra)
    return {"command": command, "error": err}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s", stream=sys.stderr)
    code = EXIT_OK
    try:
        report = args.func(args)
    except CommandFailed as exc:
        code, report = exc.code, exc.report
    except json.JSONDecodeError as exc:
        log.error("%s: parse error at line %d column %d: %s", getattr(args, "path", ""), exc.lineno, exc.colno, exc.msg)
        code = EXIT_IO
        report = _error_report(args.command, exc, line=exc.lineno, column=exc.colno)
    except (OSError, FormatError) as exc:
        log.error("%s", exc)
        code, report = EXIT_IO, _error_report(args.command, exc)
    except ValidationError as exc:
        log.error("%s", exc)
        code = EXIT_DOMAIN
        report = _error_report(args.command, exc, condition=exc.condition, magnitude=exc.magnitude)
    except (QHCError, ValueError) as exc:
        log.error("%s", exc)
        code, report = EXIT_DOMAIN, _error_report(args.command, exc)
    try:
        write_text(dumps(report), args.output)
    except OSError as exc:
        log.error("cannot write report: %s", exc)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
