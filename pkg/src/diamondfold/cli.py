"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
Payloads go to stdout; diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import aminoacids, folding, quantum, rama, structure
from .chain import ConformationCode
from .geometry import E, bond_angle_deg, cos_bond_angle

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror}") from None


def _split_sequence(seq: str) -> list[str]:
    seq = seq.strip()
    return seq.split(",") if "," in seq else list(seq)


def cmd_enumerate(args) -> str:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    confs = folding.enumerate_conformations(args.n, cis=args.cis)
    total = folding.code_space_size(args.n, args.cis)
    codes = [ConformationCode.from_dofs(c.dofs, ["X"] * args.n, c.omegas).to_string()
             for c in confs] if not args.count_only else None
    if args.json:
        out = {"n": args.n, "cis": args.cis, "total": total, "self_avoiding": len(confs)}
        if codes is not None:
            out["codes"] = codes
        return _dump(out)
    if args.count_only:
        return _csv([[args.n, total, len(confs)]], ["n", "total", "self_avoiding"])
    return _csv([[c] for c in codes], ["code"])


def cmd_fold(args) -> str:
    model = folding.load_model(args.model) if args.model in folding.BUILTIN_MODELS else \
        folding.parse_model(_read(args.model), name=args.model)
    seq = _split_sequence(args.sequence)
    try:
        [model.label(a) for a in seq]
    except KeyError as exc:
        raise DataError(str(exc.args[0])) from None
    if args.anneal:
        sched = folding.Schedule(args.t_start, args.t_end, args.steps)
        report = folding.anneal_fold(seq, model, sched, seed=args.seed, allow_cis=args.cis,
                                     record_every=args.record_every if args.trajectory else 0)
        if args.trajectory:
            with open(args.trajectory, "w") as fh:
                fh.write(report.trajectory_csv())
    else:
        report = folding.exhaustive_fold(seq, model, n_max=args.n_max, cis=args.cis)
    if args.json:
        return report.to_json() + "\n"
    lines = [f"method {report.method}", f"best_energy {report.best_energy!r}",
             f"states_examined {report.states_examined}"]
    lines += [f"code {c.to_string()}" for c in report.codes]
    return "\n".join(lines) + "\n"


def _parsed(path):
    return structure.parse_pdb_subset(_read(path))


def cmd_fit(args) -> str:
    fit = structure.fit_to_lattice(_parsed(args.pdb), scale=args.scale)
    if args.json:
        return fit.to_json() + "\n"
    return f"code {fit.code.to_string()}\nrmsd_angstrom {fit.rmsd:.6f}\nscale {fit.scale}\n"


def cmd_rama(args) -> str:
    parsed = _parsed(args.pdb)
    table = rama.phi_psi_omega(parsed, [r.seq for r in parsed.residues])
    if args.json:
        return _dump([
            {"residue_index": r.index, "phi": r.phi, "psi": r.psi, "omega": r.omega,
             "star_phi": r.star()[0], "star_psi": r.star()[1]} for r in table])
    return rama.angle_table_csv(table)


def cmd_grover(args) -> str:
    if args.items is not None or args.queries is not None:
        if args.items is None or args.queries is None:
            raise UsageError("--items and --queries go together")
        try:
            inst = quantum.SearchInstance(args.items, args.queries)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        p = quantum.grover_simulate(inst)
        closed = quantum.success_probability(args.items, args.queries)
        row = {"items": args.items, "queries": args.queries, "success": p,
               "failure": 1 - p, "closed_form": closed}
        if args.json:
            return _dump(row)
        return _csv([[args.items, args.queries, f"{p:.12f}", f"{1 - p:.6e}"]],
                    ["items", "queries", "success", "failure"])
    rows = quantum.alphabet_table()
    if args.json:
        return _dump([{"queries": r.queries, "capacity": r.capacity, "floor": r.floor,
                       "alphabet": r.alphabet} for r in rows])
    return _csv([[r.queries, f"{r.capacity:#.4g}", r.floor, r.alphabet] for r in rows],
                ["queries", "capacity", "floor", "alphabet"])


def cmd_table(args) -> str:
    if args.check:
        checks = aminoacids.check_table()
        payload = _dump(checks) if args.json else _csv(
            [[k, "pass" if v else "fail"] for k, v in checks.items()], ["check", "result"])
        if not all(checks.values()):
            sys.stdout.write(payload)
            raise DataError("table checks failed")
        return payload
    if args.json:
        return aminoacids.table_json() + "\n"
    return aminoacids.table_text()


def cmd_lattice_info(args) -> str:
    info = {
        "bond_vectors": [[str(c) for c in e] for e in E],
        "cos_bond_angle": str(cos_bond_angle()),
        "bond_angle_deg": round(bond_angle_deg(), 6),
        "packing_diamond": round(folding.packing_fraction_analytic("diamond"), 6),
        "packing_fcc": round(folding.packing_fraction_analytic("fcc"), 6),
        "successors_per_residue": 9,
        "elementary_operations": 10,
    }
    if args.json:
        return _dump(info)
    lines = [f"e{i} = ({', '.join(v)})" for i, v in enumerate(info["bond_vectors"], 1)]
    lines += [
        f"bond angle = {info['bond_angle_deg']:.2f} deg (cos = {info['cos_bond_angle']})",
        f"packing fraction diamond = {info['packing_diamond']:.4f}",
        f"packing fraction fcc = {info['packing_fcc']:.4f}",
    ]
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="emit JSON instead of CSV/text")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")

    p = _Parser(prog="diamondfold", description="Diamond-lattice polypeptide toolkit")
    p.add_argument("--json", action="store_true", help="emit JSON instead of CSV/text")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("enumerate", parents=[common], help="self-avoiding code enumeration")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--cis", action="store_true")
    s.add_argument("--count-only", action="store_true")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("fold", parents=[common], help="fold a sequence on the lattice")
    s.add_argument("--sequence", required=True, help="e.g. HPPHPH or Ala,Gly,Ser")
    s.add_argument("--model", required=True, help="energy model file, or 'hp' / 'class'")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--anneal", action="store_true")
    s.add_argument("--steps", type=int, default=20000)
    s.add_argument("--t-start", type=float, default=2.0)
    s.add_argument("--t-end", type=float, default=0.05)
    s.add_argument("--n-max", type=int, default=8)
    s.add_argument("--cis", action="store_true")
    s.add_argument("--trajectory", help="write annealing trajectory CSV here")
    s.add_argument("--record-every", type=int, default=100)
    s.set_defaults(func=cmd_fold)

    s = sub.add_parser("fit", parents=[common], help="fit a PDB backbone onto the lattice")
    s.add_argument("--pdb", required=True)
    s.add_argument("--scale", type=float, default=structure.DEFAULT_SCALE)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("rama", parents=[common], help="phi/psi/omega table of a PDB backbone")
    s.add_argument("--pdb", required=True)
    s.add_argument("--csv", action="store_true", help="CSV output (default)")
    s.set_defaults(func=cmd_rama)

    s = sub.add_parser("grover", parents=[common], help="quantum search capacities")
    s.add_argument("--capacity-table", action="store_true")
    s.add_argument("--items", type=int)
    s.add_argument("--queries", type=int)
    s.set_defaults(func=cmd_grover)

    s = sub.add_parser("table", parents=[common], help="amino-acid class table")
    s.add_argument("--check", action="store_true")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("lattice-info", parents=[common], help="lattice constants")
    s.set_defaults(func=cmd_lattice_info)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help
            return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
        if args.command == "fold" and args.anneal is False and args.exhaustive is False:
            args.exhaustive = True
        out = args.func(args)
        stdout.write(out)
        return EXIT_OK
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except (DataError, structure.PDBParseError, folding.SearchTooLargeError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DATA
    except (ValueError, LookupError, KeyError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
