"""Command-line entry point.

Exit codes:
  0  success / decision "yes"
  1  decision "no", failed validation report or failed verification
  2  unreadable input, schema error or bad usage
  3  amalgam rejected by validation (edge not of the form finite ⋊ infinite cyclic)
  4  amalgam with a finite edge (not supported)
  5  construction error inside the embedding pipeline
"""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from .errors import (
    DisconnectedGraph, ParseError, SchemaError, TrivialEdgeWord, UnsupportedFiniteEdge, ValidationError,
    VamalgError,
)
from .fiber import cycle_disjoint, decide_fibering, decide_free_by_cyclic, validate_fbc
from .perm import DEFAULT_CAP
from .pipeline import build_embedding_certificate, check_edge_is_infinite, validate_spec, verify_certificate
from .report import Report
from .serialize import (
    _jsonable, certificate_from_json, certificate_to_json, decode_payload, dumps,
    make_document, parse_job,
)
from .vagroup import validate_extension

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_REJECTED, EXIT_FINITE_EDGE, EXIT_CONSTRUCTION = 0, 1, 2, 3, 4, 5

COMMANDS = ("validate", "embed", "verify", "fiber", "tubular")


def _error(code, exc, label=None):
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if getattr(exc, "field", None):
        payload["field"] = exc.field
    if getattr(exc, "stage", None):
        payload["stage"] = exc.stage
    report = getattr(exc, "report", None)
    if report is not None:
        payload["report"] = report.to_json()
    return code, make_document("error", payload, label)


def _report_doc(report, label, extra=None):
    payload = {"report": report.to_json()}
    if extra:
        payload.update(extra)
    return make_document("report", payload, label)


def cmd_validate(doc, cap=DEFAULT_CAP):
    obj = decode_payload(doc)
    kind, label = doc["kind"], doc.get("label")
    if kind == "extension":
        rep = validate_extension(obj)
    elif kind == "free_by_cyclic":
        rep = validate_fbc(obj)
    elif kind == "amalgam_embed":
        rep = validate_spec(obj)
    elif kind == "fiber_amalgam":
        rep = Report("fiber amalgam")
        for i, f in enumerate((obj.factor1, obj.factor2), 1):
            sub = validate_fbc(f) if hasattr(f, "phi") else validate_extension(f)
            rep.extend(sub, f"factor{i}: ")
    elif kind == "fbc_amalgam":
        rep = Report("free-by-cyclic amalgam")
        rep.extend(validate_fbc(obj[0]), "factor1: ")
        rep.extend(validate_fbc(obj[1]), "factor2: ")
    elif kind == "tubular_graph":
        rep = Report("graph")
        rep.add("connected and non-empty", obj.is_connected())
    else:
        raise SchemaError("kind", f"cannot validate a {kind!r} document")
    return (EXIT_OK if rep.ok else EXIT_NO), _report_doc(rep, label)


def cmd_embed(doc, cap=DEFAULT_CAP):
    label = doc.get("label")
    if doc["kind"] != "amalgam_embed":
        raise SchemaError("kind", "embed needs an amalgam_embed document")
    spec = decode_payload(doc)
    try:
        check_edge_is_infinite(spec)
    except UnsupportedFiniteEdge as exc:
        return _error(EXIT_FINITE_EDGE, exc, label)
    except VamalgError as exc:
        return _error(EXIT_REJECTED, exc, label)
    rep = validate_spec(spec)
    if not rep.ok:
        return _error(EXIT_REJECTED, ValidationError("amalgam rejected by validation", rep), label)
    try:
        cert = build_embedding_certificate(spec, cap=cap)
    except UnsupportedFiniteEdge as exc:
        return _error(EXIT_FINITE_EDGE, exc, label)
    except VamalgError as exc:
        return _error(EXIT_CONSTRUCTION, exc, label)
    code = EXIT_OK if cert.verification.ok else EXIT_NO
    return code, make_document("certificate", certificate_to_json(cert), label)


def cmd_verify(spec_doc, cert_doc, cap=DEFAULT_CAP):
    if spec_doc["kind"] != "amalgam_embed":
        raise SchemaError("kind", "verify needs an amalgam_embed document first")
    if cert_doc["kind"] != "certificate":
        raise SchemaError("kind", "verify needs a certificate document second")
    spec = decode_payload(spec_doc)
    cert = certificate_from_json(cert_doc["payload"], spec)
    rep = verify_certificate(spec, cert, cap=cap)
    return (EXIT_OK if rep.ok else EXIT_NO), _report_doc(rep, cert_doc.get("label"))


def cmd_fiber(doc, cap=DEFAULT_CAP):
    label = doc.get("label")
    obj = decode_payload(doc)
    try:
        if doc["kind"] == "fiber_amalgam":
            d = decide_fibering(obj)
            payload = {"question": "fibered", "answer": d.fibered, "notes": d.notes}
            if d.failing_side is not None:
                payload["failing_side"] = str(d.failing_side)
            if d.character is not None:
                payload["character"] = {"factor1": _jsonable(d.character.factor1),
                                        "factor2": _jsonable(d.character.factor2),
                                        "edge_value": str(d.character.edge_value),
                                        "transcript": d.character.transcript.to_json()}
            yes = d.fibered
        elif doc["kind"] == "fbc_amalgam":
            d = decide_free_by_cyclic(*obj)
            payload = {"question": "free_by_cyclic", "answer": d.free_by_cyclic, "reason": d.reason}
            yes = d.free_by_cyclic
        else:
            raise SchemaError("kind", "fiber needs a fiber_amalgam or fbc_amalgam document")
    except TrivialEdgeWord as exc:
        return _error(EXIT_INPUT, exc, label)
    return (EXIT_OK if yes else EXIT_NO), make_document("decision", payload, label)


def cmd_tubular(doc, cap=DEFAULT_CAP):
    label = doc.get("label")
    if doc["kind"] != "tubular_graph":
        raise SchemaError("kind", "tubular needs a tubular_graph document")
    g = decode_payload(doc)
    try:
        ok = cycle_disjoint(g)
    except DisconnectedGraph as exc:
        return _error(EXIT_INPUT, exc, label)
    balanced = doc["payload"].get("balanced")
    payload = {
        "cycle_disjoint": ok,
        "balanced": "asserted by user, not verified" if balanced else "not asserted, not verified",
        "note": "balancedness of the tubular group is a hypothesis supplied by the user; "
                "only the graph condition is decided here",
    }
    return (EXIT_OK if ok else EXIT_NO), make_document("decision", payload, label)


HANDLERS = {"validate": cmd_validate, "embed": cmd_embed, "fiber": cmd_fiber, "tubular": cmd_tubular}


def run_one(command, path, cap=DEFAULT_CAP):
    """``(exit_code, output_document)`` for a single-document command."""
    try:
        doc = parse_job(path)
        return HANDLERS[command](doc, cap=cap)
    except (ParseError, SchemaError) as exc:
        return _error(EXIT_INPUT, exc)
    except ValidationError as exc:
        return _error(EXIT_REJECTED, exc)
    except VamalgError as exc:
        return _error(EXIT_CONSTRUCTION, exc)


def run_verify(spec_path, cert_path, cap=DEFAULT_CAP):
    try:
        return cmd_verify(parse_job(spec_path), parse_job(cert_path), cap=cap)
    except (ParseError, SchemaError) as exc:
        return _error(EXIT_INPUT, exc)
    except VamalgError as exc:
        return _error(EXIT_CONSTRUCTION, exc)


def _run_star(args):
    return run_one(*args)


def build_parser():
    p = argparse.ArgumentParser(prog="vamalg", description=(
        "Embed amalgams of virtually abelian groups over virtually cyclic subgroups into Z wr S_m, "
        "verify such embeddings, and decide fibering questions."))
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("paths", nargs="*", help="job documents ('-' reads standard input); verify takes SPEC CERT")
    p.add_argument("--output", "-o", help="write the result here instead of standard output")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest finite group order to tabulate")
    p.add_argument("--jobs", type=int, default=1, help="process several documents in parallel")
    p.add_argument("--seed-fixtures", nargs="?", const="fixtures", metavar="DIR",
                   help="write the shipped fixture corpus to DIR (default ./fixtures)")
    return p


def _emit(text, output):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed_fixtures is not None:
        from .fixtures import write_corpus

        written = write_corpus(args.seed_fixtures)
        sys.stderr.write(f"wrote {len(written)} fixtures to {args.seed_fixtures}\n")
        if args.command is None:
            return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    if args.cap < 1 or args.jobs < 1:
        parser.print_usage(sys.stderr)
        sys.stderr.write("--cap and --jobs must be positive\n")
        return EXIT_INPUT
    if args.command == "verify":
        if len(args.paths) != 2:
            sys.stderr.write("verify takes exactly two paths: SPEC CERT\n")
            return EXIT_INPUT
        code, doc = run_verify(args.paths[0], args.paths[1], args.cap)
        _emit(dumps(doc), args.output)
        return code
    if not args.paths:
        sys.stderr.write(f"{args.command} needs at least one path\n")
        return EXIT_INPUT
    if len(args.paths) == 1:
        code, doc = run_one(args.command, args.paths[0], args.cap)
        _emit(dumps(doc), args.output)
        return code
    tasks = [(args.command, p, args.cap) for p in args.paths]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_run_star, tasks))
    else:
        results = [_run_star(t) for t in tasks]
    _emit(json.dumps([doc for _, doc in results], indent=2) + "\n", args.output)
    return max(code for code, _ in results)


if __name__ == "__main__":
    sys.exit(main())
