"""Batch front end: parse JSON documents, dispatch, emit structured reports.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 parse or
usage error.  ``--json`` emits the machine-readable report (re-parsing it
reproduces every residual exactly); the randomized subcommands require an
explicit ``--seed`` in that mode so the emitted bytes are reproducible.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

from . import documents
from .bundle import check_cocycle, check_locally_modelled, check_reduction
from .calculus import curvature, is_integrable_structure, is_metric_integrable, levi_civita
from .compat import check_triple, complete_triple
from .documents import DocumentError
from .errors import TensorStructError
from .limits import check_coherent, check_connection_coherence, validate_bonding
from .linalg import Tolerance
from .loopspace import (
    DiscretizedLoopSpace,
    ascending_coherence,
    block_kahler_target,
    check_induced_compatibility,
)
from .report import Report
from .structures import darboux_basis, validate

RANDOMIZED = {"loopspace"}


def _load(path):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(raw), hashlib.sha256(raw).hexdigest()
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path} is not valid JSON: {exc}") from exc


def _emit(report: Report, as_json):
    if as_json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        for entry in report.entries:
            status = "pass" if entry.passed else "FAIL"
            location = f"  [{entry.location}]" if entry.location else ""
            print(f"{status}  {entry.name}  residual={entry.residual:.3e}{location}")
        for note in report.notes:
            print(f"note: {note}")
        print(f"{'PASS' if report.passed else 'FAIL'} "
              f"({len(report.entries)} checks, worst residual "
              f"{report.worst_residual:.3e})")
    return report.exit_status


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tensorstruct",
        description="Validate and construct tensor structures, check their "
                    "integrability, and verify projective/direct towers.")
    parser.add_argument("--atol", type=float, default=1e-9)
    parser.add_argument("--rtol", type=float, default=1e-9)
    parser.add_argument("--fd-step", type=float, default=1e-5)
    parser.add_argument("--json", action="store_true",
                        help="emit a machine-readable report")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for randomized subcommands")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a structure document")
    p.add_argument("structure", help="structure JSON file")

    triple = sub.add_parser("triple", help="compatible triple operations")
    tsub = triple.add_subparsers(dest="triple_command", required=True)
    p = tsub.add_parser("complete", help="complete a compatible pair")
    p.add_argument("pair", help="pair JSON file")

    p = sub.add_parser("darboux", help="canonical basis of a symplectic form")
    p.add_argument("form", help="structure JSON file of kind symplectic")

    p = sub.add_parser("cocycle", help="check transition-cocycle condition")
    p.add_argument("atlas", help="atlas JSON file")

    p = sub.add_parser("reduce", help="check isotropy reduction of an atlas")
    p.add_argument("atlas", help="atlas JSON file")
    p.add_argument("tensor", help="model tensor JSON file")
    p.add_argument("--field", default=None,
                   help="optional field document to test local modelling")

    p = sub.add_parser("nijenhuis", help="integrability of a structure field")
    p.add_argument("field", help="field JSON file")
    p.add_argument("--kind", default="tangent",
                   choices=["tangent", "para_complex", "complex"])
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("curvature", help="flatness of a metric field")
    p.add_argument("metric", help="field JSON file")
    p.add_argument("--tol", type=float, default=1e-5)

    tower = sub.add_parser("tower", help="bonding-system and sequence checks")
    wsub = tower.add_subparsers(dest="tower_command", required=True)
    p = wsub.add_parser("check", help="validate bonding maps and coherence")
    p.add_argument("tower", help="tower JSON file")

    conn = sub.add_parser("connection", help="adapted connection towers")
    csub = conn.add_subparsers(dest="connection_command", required=True)
    p = csub.add_parser("check", help="adaptedness and cross-level coherence")
    p.add_argument("tower", help="connection tower JSON file")

    p = sub.add_parser("loopspace", help="induced loop-space structures")
    lsub = p.add_subparsers(dest="loopspace_command", required=True)
    d = lsub.add_parser("demo", help="canonical ascending Kahler demo")
    d.add_argument("--levels", type=int, default=3)
    d.add_argument("--samples", type=int, default=16)
    d = lsub.add_parser("check", help="check a loop document")
    d.add_argument("loop", help="loop JSON file")
    d.add_argument("--trials", type=int, default=20)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    tol = Tolerance(args.atol, args.rtol)

    if args.command in RANDOMIZED and args.json and args.seed is None:
        print("error: randomized subcommands need --seed with --json",
              file=sys.stderr)
        return 2
    rng = np.random.default_rng(0 if args.seed is None else args.seed)

    try:
        report = _dispatch(args, tol, rng)
    except DocumentError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except TensorStructError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return _emit(report, args.json)


def _digest_of(*paths):
    digests = []
    for path in paths:
        _, digest = _load(path)
        digests.append(digest)
    return ",".join(digests)


def _dispatch(args, tol, rng) -> Report:
    if args.command == "validate":
        doc, digest = _load(args.structure)
        structure = documents.parse_structure(doc)
        report = validate(structure, tol)
        report.command, report.digest = "validate", digest
        return report

    if args.command == "triple":
        doc, digest = _load(args.pair)
        first, second, flavor = documents.parse_pair(doc)
        triple = complete_triple(first, second, flavor, tol)
        report = check_triple(triple, tol)
        report.command, report.digest = "triple complete", digest
        report.note(f"flavor {flavor}, dimension {triple.dim}")
        report.note("omega=" + json.dumps(triple.omega.matrix.tolist()))
        report.note("metric=" + json.dumps(triple.metric_matrix.tolist()))
        report.note("structure=" + json.dumps(triple.structure.matrix.tolist()))
        return report

    if args.command == "darboux":
        doc, digest = _load(args.form)
        structure = documents.parse_structure(doc)
        if not hasattr(structure, "matrix") or structure.matrix.shape[0] % 2:
            raise DocumentError("darboux needs an even-dimensional form")
        from .structures import SymplecticForm
        form = structure if isinstance(structure, SymplecticForm) else \
            SymplecticForm(structure.matrix)
        basis, certificate = darboux_basis(form, tol)
        report = Report("darboux", digest)
        report.add("canonical_form_residual", tol.accepts(certificate, 1.0),
                   certificate)
        report.note("basis=" + json.dumps(basis.tolist()))
        return report

    if args.command == "cocycle":
        doc, digest = _load(args.atlas)
        atlas = documents.parse_atlas(doc)
        report = check_cocycle(atlas, tol)
        report.command, report.digest = "cocycle", digest
        return report

    if args.command == "reduce":
        adoc, _ = _load(args.atlas)
        tdoc, _ = _load(args.tensor)
        atlas = documents.parse_atlas(adoc)
        spec = documents.parse_tensor(tdoc)
        report = check_reduction(atlas, spec, tol)
        if args.field:
            fdoc, _ = _load(args.field)
            field = _field_on_charts(fdoc, atlas)
            report.extend(check_locally_modelled(field, atlas, spec, tol),
                          prefix="field/")
        report.command = "reduce"
        report.digest = _digest_of(args.atlas, args.tensor)
        return report

    if args.command == "nijenhuis":
        doc, digest = _load(args.field)
        field, grid = documents.parse_field(doc, fd_step=args.fd_step)
        verdict = is_integrable_structure(field, args.kind, grid, tol=args.tol)
        report = Report("nijenhuis", digest)
        report.add(f"defect_tensor_{args.kind}", verdict.passed,
                   verdict.max_residual, verdict.location)
        report.note(f"verdict: {verdict.label}")
        return report

    if args.command == "curvature":
        doc, digest = _load(args.metric)
        field, grid = documents.parse_field(doc, fd_step=args.fd_step)
        verdict = is_metric_integrable(field, grid, tol=args.tol)
        report = Report("curvature", digest)
        report.add("curvature_residual", verdict.passed, verdict.max_residual,
                   verdict.location)
        report.note(f"verdict: {verdict.label}")
        return report

    if args.command == "tower":
        doc, digest = _load(args.tower)
        bonding, sequence = documents.parse_tower(doc)
        report = validate_bonding(bonding, tol)
        if sequence is not None:
            report.extend(check_coherent(sequence, tol), prefix="sequence/")
        report.command, report.digest = "tower check", digest
        return report

    if args.command == "connection":
        doc, digest = _load(args.tower)
        seq, points = documents.parse_connection_tower(doc)
        report = check_connection_coherence(seq, points, tol)
        report.command, report.digest = "connection check", digest
        return report

    if args.command == "loopspace":
        if args.loopspace_command == "demo":
            report = Report("loopspace demo")
            targets = [block_kahler_target(m) for m in range(1, args.levels + 1)]
            loop = rng.normal(size=(args.samples, targets[0].dim))
            space = DiscretizedLoopSpace(targets[0], loop)
            report.extend(check_induced_compatibility(space, trials=20, tol=tol,
                                                      rng=rng),
                          prefix="induced/")
            report.extend(ascending_coherence(targets, args.samples, tol, rng=rng),
                          prefix="ascending/")
            report.note(f"levels={args.levels} samples={args.samples} "
                        f"seed={'default' if args.seed is None else args.seed}")
            return report
        doc, digest = _load(args.loop)
        space, tangents = documents.parse_loop(doc)
        report = check_induced_compatibility(space, trials=args.trials, tol=tol,
                                             rng=rng)
        if tangents is not None:
            from .loopspace import induced_forms
            o, g, _ = induced_forms(space, *tangents)
            report.note(f"omega(x, y)={o!r} g(x, y)={g!r}")
        report.command, report.digest = "loopspace check", digest
        return report

    raise DocumentError(f"unknown command {args.command!r}")


def _field_on_charts(fdoc, atlas):
    from .bundle import LocalTensorField
    field, _ = documents.parse_field(fdoc)
    evaluators = {chart.name: field.fn for chart in atlas.charts}
    return LocalTensorField(field.kind, evaluators, field.symmetry)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
