"""Command-line interface: ``gnets <subcommand> ...``.

Reports go to stdout as ``key: value`` lines; diagnostics go to stderr.
Exit codes: 0 success, 1 validation or verification failure, 2 solver
failure, 64 usage error.
"""
from __future__ import annotations

import argparse
import os
import sys

from .all_equilibria import SolveConfig, all_equilibria, all_equilibria_decomposed, build_poly_system
from .decomposition import decompose, project
from .equilibrium import classify
from .first_equilibrium import DegenerateGame, first_equilibrium_decomposed, track_first_equilibrium
from .io import ParseError, format_profile, load_game, parse_ef, print_game, read_solutions, write_solutions
from .model import InvalidNet, information_sets, parameter_count
from .tracking import TrackerConfig

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_USAGE = 0, 1, 2, 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gnets", description="Equilibria of game networks.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("validate", help="check a game file")
    s.add_argument("file")

    s = sub.add_parser("info", help="structure, parameter counts and system degrees")
    s.add_argument("file")

    s = sub.add_parser("solve-first", help="follow the homotopy from the uniform profile")
    s.add_argument("file")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trace", help="write accepted path points to this file")
    s.add_argument("--endpoint-t", type=float, default=TrackerConfig.endpoint_t)
    s.add_argument("--decompose", action="store_true")
    s.add_argument("-o", "--output", help="write a solution file")

    s = sub.add_parser("solve-all", help="all isolated equilibria by polynomial homotopy")
    s.add_argument("file")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=SolveConfig.tol)
    s.add_argument("--decompose", action="store_true")
    s.add_argument("-o", "--output", help="write a solution file")

    s = sub.add_parser("verify", help="check every profile in a solution file")
    s.add_argument("file")
    s.add_argument("solution")
    s.add_argument("--tol", type=float, default=1e-6)

    s = sub.add_parser("convert-ef", help="convert an extensive-form file to a game file")
    s.add_argument("ef_file")
    s.add_argument("-o", "--output", required=True)
    return p


def _emit(key, value, out):
    print(f"{key}: {value}", file=out)


def _trace_path(path):
    if path is None or os.path.isabs(path) or os.path.dirname(path):
        return path
    base = os.environ.get("GNETS_TRACE_DIR")
    return os.path.join(base, path) if base else path


def cmd_validate(args, out):
    net = load_game(args.file)
    _emit("valid", "yes", out)
    _emit("nodes", len(net.nodes), out)
    _emit("players", " ".join(net.players), out)
    return EXIT_OK


def cmd_info(args, out):
    net = load_game(args.file)
    pot, ef = parameter_count(net)
    _emit("nodes", " ".join(n.name for n in net.nodes), out)
    _emit("players", " ".join(net.players), out)
    _emit("info_sets", len(information_sets(net)), out)
    _emit("free_coordinates", len(net.layout.free_coords), out)
    _emit("parameter_count", f"{pot} {ef}", out)
    esys = build_poly_system(net)
    _emit("equation_degrees", " ".join(map(str, esys.degrees)) or "-", out)
    _emit("total_degree", esys.total_degree, out)
    comps = decompose(net)
    _emit("components", len(comps), out)
    for i, comp in enumerate(comps):
        names = ",".join(net.nodes[k].name for k in comp.nodes)
        if comp.free_coordinates:
            sub = build_poly_system(project(net, comp))
            deg = f"equations={len(sub.degrees)} total_degree={sub.total_degree}"
        else:
            deg = "equations=0 total_degree=1"
        _emit(f"component {i}", f"{names} free={len(comp.free_coordinates)} {deg}", out)
    return EXIT_OK


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def cmd_solve_first(args, out):
    net = load_game(args.file)
    cfg = TrackerConfig(rng_seed=args.seed, endpoint_t=args.endpoint_t)
    try:
        if args.decompose:
            res = first_equilibrium_decomposed(net, cfg)
        else:
            trace = _trace_path(args.trace)
            if trace:
                with open(trace, "w", encoding="utf-8") as fh:
                    res = track_first_equilibrium(net, cfg, trace=fh)
            else:
                res = track_first_equilibrium(net, cfg)
    except DegenerateGame as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        _emit("status", "failed", out)
        return EXIT_SOLVER
    cls = res.classification
    _emit("status", "ok", out)
    _emit("label", cls.label.value, out)
    _emit("accepted_steps", res.path.accepted, out)
    _emit("rejected_steps", res.path.rejected, out)
    _emit("perturbed", "yes" if res.perturbed else "no", out)
    _emit("worst_violation", f"{cls.verdict.worst_violation:.17g}", out)
    for line in format_profile(net, res.profile.values):
        print(line, file=out)
    print(f"seconds: {res.seconds:.3f}", file=sys.stderr)
    if args.output:
        _write(args.output, write_solutions(net, [res.profile], [cls]))
    return EXIT_OK if cls.verdict.is_nash else EXIT_SOLVER


def cmd_solve_all(args, out):
    net = load_game(args.file)
    cfg = SolveConfig(seed=args.seed, tol=args.tol)
    rep = (all_equilibria_decomposed if args.decompose else all_equilibria)(net, cfg)
    _emit("total_degree", rep.total_degree, out)
    _emit("paths_tracked", rep.paths_tracked, out)
    for k in sorted(rep.path_statistics):
        _emit(f"paths_{k}", rep.path_statistics[k], out)
    _emit("nash_count", len(rep.nash), out)
    _emit("fixed_point_non_nash_count", len(rep.fixed_points_non_nash), out)
    for i, prof in enumerate(rep.nash):
        _emit("nash", i, out)
        for line in format_profile(net, prof.values):
            print(line, file=out)
    for note in rep.notes:
        print(f"note: {note}", file=sys.stderr)
    print(f"seconds: {rep.seconds:.3f}", file=sys.stderr)
    if args.output:
        classes = [classify(net, p, "polynomial", cfg.tol) for p in rep.nash]
        _write(args.output, write_solutions(net, rep.nash, classes))
    return EXIT_OK if rep.nash else EXIT_SOLVER


def cmd_verify(args, out):
    net = load_game(args.file)
    with open(args.solution, encoding="utf-8") as fh:
        profiles = read_solutions(net, fh.read())
    code = EXIT_OK
    _emit("records", len(profiles), out)
    for i, prof in enumerate(profiles):
        problems = prof.problems()
        if problems:
            _emit(f"record {i}", "invalid " + "; ".join(problems), out)
            code = EXIT_INVALID
            continue
        cls = classify(net, prof, "user", args.tol)
        _emit(f"record {i}", f"{cls.label.value} worst={cls.verdict.worst_violation:.3g}", out)
        if not cls.verdict.is_nash:
            code = EXIT_INVALID
            for rep in cls.verdict.violators:
                _emit(f"violation {i}", f"{rep.label} slack={rep.violation:.3g}", out)
    return code


def cmd_convert_ef(args, out):
    from .extensive_form import ef_conversion

    with open(args.ef_file, encoding="utf-8") as fh:
        conv = ef_conversion(parse_ef(fh.read()))
    _write(args.output, print_game(conv.net))
    pot, ef = parameter_count(conv.net)
    _emit("nodes", " ".join(n.name for n in conv.net.nodes), out)
    _emit("parameter_count", f"{pot} {ef}", out)
    for lab, (k, h) in conv.infoset_blocks.items():
        node = conv.net.nodes[k]
        given = ",".join(f"{conv.net.nodes[m].name}={conv.net.nodes[m].domain[v]}"
                         for m, v in zip(node.parents, h))
        _emit(f"info_set {lab}", f"{node.name}|{given}" if given else node.name, out)
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "info": cmd_info, "solve-first": cmd_solve_first,
            "solve-all": cmd_solve_all, "verify": cmd_verify, "convert-ef": cmd_convert_ef}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, out)
    except (ParseError, InvalidNet, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.command in ("validate", "info", "verify"):
            _emit("valid", "no", out)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
