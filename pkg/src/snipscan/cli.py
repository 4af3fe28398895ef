"""Command-line front end wiring the toolkit together.

Subcommands: parse, cpg, scan, fingerprint, index, match, study, stats.
Machine output goes to stdout as JSON (other layouts via --format);
diagnostics go to stderr.  Exit codes: 0 success, 1 usage or
configuration problem, 2 unparsable input, 3 analysis budget exhausted.

Every flag can also be supplied through an environment variable named
after it with the SNIPSCAN_ prefix (SNIPSCAN_ETA for --eta, and so on).
A flag given on the command line wins over its environment variable.
"""

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .clone import (
    DEFAULT_EPSILON_THRESHOLD,
    DEFAULT_ETA,
    DEFAULT_NGRAM,
    STUDY_EPSILON_THRESHOLD,
    CloneParams,
    DuplicateId,
    EmptyFingerprint,
    Fingerprint,
    NgramIndex,
    StorageError,
    fingerprint_source,
    match,
    read_fingerprints,
    write_fingerprints,
)
from .cpg import build_cpg, to_dot, to_json
from .detectors import detector_ids, scan
from .graphquery import DEFAULT_LADDER, DEFAULT_WALL_CLOCK_LIMIT
from .parser import ParseError, parse_source
from .pipeline import (
    DegenerateSample,
    IoError,
    MissingKeywordFile,
    SchemaError,
    StudyConfig,
    report_json,
    report_text,
    run_study,
    spearman,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

ENV_PREFIX = "SNIPSCAN_"


class UsageError(Exception):
    """Bad flag value, bad config, or a path that does not exist."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors, which collides with
    # our "unparsable input" code, so route those through status 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(EXIT_USAGE)


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _eta_value(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("eta must lie in [0, 1]")
    return value


def _epsilon_value(text):
    value = float(text)
    if not 0.0 <= value <= 100.0:
        raise argparse.ArgumentTypeError("epsilon must lie in [0, 100]")
    return value


def _timeout_value(text):
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("timeout must be positive")
    return value


def _ladder_value(text):
    steps = []
    for part in text.split(","):
        part = part.strip()
        if part:
            steps.append(_positive_int(part))
    if not steps:
        raise argparse.ArgumentTypeError("ladder needs at least one step")
    return tuple(steps)


def _detectors_value(text):
    known = set(detector_ids())
    wanted = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if part not in known:
            raise argparse.ArgumentTypeError("unknown detector %r" % part)
        wanted.append(part)
    if not wanted:
        raise argparse.ArgumentTypeError("no detector ids given")
    return tuple(wanted)


def _format_value(allowed):
    def check(text):
        if text not in allowed:
            raise argparse.ArgumentTypeError(
                "format must be one of: %s" % ", ".join(allowed))
        return text
    return check


def _env_default(flag, cast, fallback):
    """Default for a flag, honouring its SNIPSCAN_ environment variable."""
    raw = os.environ.get(ENV_PREFIX + flag.lstrip("-").replace("-", "_").upper())
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except (argparse.ArgumentTypeError, ValueError) as exc:
        raise UsageError("%s%s: %s" % (
            ENV_PREFIX, flag.lstrip("-").upper(), exc))


def _add_flag(sub, flag, cast, fallback, help_text, metavar=None):
    sub.add_argument(flag, type=cast, metavar=metavar,
                     default=_env_default(flag, cast, fallback),
                     help=help_text + " (env %s%s)" % (
                         ENV_PREFIX, flag.lstrip("-").replace("-", "_").upper()))


def _add_budget_flags(sub):
    _add_flag(sub, "--timeout", _timeout_value, DEFAULT_WALL_CLOCK_LIMIT,
              "wall-clock budget in seconds for one analysis run", "SECONDS")
    _add_flag(sub, "--ladder", _ladder_value, DEFAULT_LADDER,
              "comma-separated loop-depth ladder, e.g. 64,32,16,8", "STEPS")


def _add_clone_flags(sub, epsilon_default):
    _add_flag(sub, "--ngram", _positive_int, DEFAULT_NGRAM,
              "n-gram size for the candidate prefilter", "N")
    _add_flag(sub, "--eta", _eta_value, DEFAULT_ETA,
              "minimum n-gram containment ratio for candidates", "RATIO")
    _add_flag(sub, "--epsilon", _epsilon_value, epsilon_default,
              "minimum similarity score to report a match", "SCORE")


def _add_format_flag(sub, allowed):
    _add_flag(sub, "--format", _format_value(allowed), "json",
              "output layout: %s" % "|".join(allowed), "NAME")


def _emit(payload):
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _diag(message):
    sys.stderr.write(message.rstrip("\n") + "\n")


def _solidity_files(paths):
    """Expand file and directory arguments into a sorted list of files."""
    files = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files.extend(sorted(str(p) for p in path.rglob("*.sol")))
        elif path.is_file():
            files.append(str(path))
        else:
            raise UsageError("no such file or directory: %s" % raw)
    return files


def _read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise UsageError("cannot read %s: %s" % (path, exc))


# ---------------------------------------------------------------- parse


def _ast_dump(unit):
    data = dataclasses.asdict(unit)
    del data["source"]
    data["placeholdersSkipped"] = data.pop("placeholders_skipped")
    data.pop("source_id", None)
    return data


def cmd_parse(args):
    try:
        unit = parse_source(_read_text(args.file), source_id=args.file)
    except ParseError as exc:
        _diag("%s: %s" % (args.file, exc))
        return EXIT_INPUT
    _emit(_ast_dump(unit))
    return EXIT_OK


# ------------------------------------------------------------------ cpg


def cmd_cpg(args):
    try:
        graph = build_cpg(parse_source(_read_text(args.file), source_id=args.file))
    except ParseError as exc:
        _diag("%s: %s" % (args.file, exc))
        return EXIT_INPUT
    if args.format == "dot":
        sys.stdout.write(to_dot(graph))
    else:
        sys.stdout.write(to_json(graph, indent=2) + "\n")
    return EXIT_OK


# ----------------------------------------------------------------- scan


def _scan_one_file(task):
    path, wanted, ladder, limit = task
    try:
        text = Path(path).read_text(encoding="utf-8", errors="replace")
        graph = build_cpg(parse_source(text, source_id=path))
    except OSError as exc:
        return path, (), True, "cannot read: %s" % exc
    except ParseError as exc:
        return path, (), True, str(exc)
    report = scan(graph, detector_ids=wanted, ladder=ladder,
                  wall_clock_limit=limit)
    rows = []
    for f in report.findings:
        rows.append({"file": path, "detector": f.detector,
                     "category": f.category, "line": f.line, "col": f.col,
                     "code": f.code})
    return path, tuple(rows), report.complete, None


def cmd_scan(args):
    files = _solidity_files(args.paths)
    tasks = [(path, args.detectors, args.ladder, args.timeout)
             for path in files]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_scan_one_file, tasks))
    else:
        outcomes = [_scan_one_file(task) for task in tasks]

    findings = []
    failures = []
    complete = True
    for path, rows, done, error in outcomes:
        findings.extend(rows)
        complete = complete and done
        if error is not None:
            failures.append({"file": path, "error": error})
    findings.sort(key=lambda r: (r["file"], r["line"], r["col"], r["detector"]))

    for row in failures:
        _diag("%s: %s" % (row["file"], row["error"]))
    if args.format == "text":
        for f in findings:
            sys.stdout.write("%s:%d:%d: %s: %s\n" % (
                f["file"], f["line"], f["col"], f["detector"], f["code"]))
    else:
        _emit({"findings": findings, "complete": complete,
               "files": len(files), "failures": failures})
    if failures:
        return EXIT_INPUT
    if not complete:
        return EXIT_BUDGET
    return EXIT_OK


# ---------------------------------------------------------- fingerprint


def cmd_fingerprint(args):
    files = _solidity_files(args.paths)
    prints = {}
    failures = []
    for path in files:
        try:
            fp = fingerprint_source(_read_text(path), source_id=path)
        except ParseError as exc:
            failures.append((path, str(exc)))
            continue
        except EmptyFingerprint as exc:
            failures.append((path, str(exc)))
            continue
        prints[path] = fp.text
    for path, error in failures:
        _diag("%s: %s" % (path, error))
    if args.out:
        fps = [Fingerprint(text, source_id=sid) for sid, text in prints.items()]
        write_fingerprints(args.out, fps)
    if args.format == "text":
        for sid, text in prints.items():
            sys.stdout.write("%s\t%s\n" % (sid, text))
    else:
        _emit({"fingerprints": prints})
    return EXIT_INPUT if failures else EXIT_OK


# ---------------------------------------------------------------- index


def _load_fingerprint_file(path):
    """Accept either the tab-separated layout or cmd_fingerprint's JSON."""
    text = _read_text(path)
    if text.lstrip()[:1] == "{":
        try:
            data = json.loads(text)
        except ValueError as exc:
            raise SchemaError("%s: %s" % (path, exc))
        mapping = data.get("fingerprints", data)
        if not isinstance(mapping, dict):
            raise SchemaError("%s: expected an object of id -> text" % path)
        return {str(k): str(v) for k, v in mapping.items()}
    return {fp.source_id: fp.text for fp in read_fingerprints(path)}


def cmd_index(args):
    try:
        mapping = _load_fingerprint_file(args.fingerprints)
        index = NgramIndex(n=args.ngram)
        for sid in sorted(mapping):
            index.add(Fingerprint(mapping[sid], source_id=sid))
    except (SchemaError, DuplicateId, ValueError) as exc:
        _diag(str(exc))
        return EXIT_INPUT
    try:
        index.persist(args.out)
    except StorageError as exc:
        _diag(str(exc))
        return EXIT_USAGE
    _emit({"indexed": len(mapping), "n": args.ngram, "path": args.out})
    return EXIT_OK


# ---------------------------------------------------------------- match


def cmd_match(args):
    try:
        index = NgramIndex.load(args.index)
    except StorageError as exc:
        _diag(str(exc))
        return EXIT_INPUT
    try:
        fp = fingerprint_source(_read_text(args.file), source_id=args.file)
    except (ParseError, EmptyFingerprint) as exc:
        _diag("%s: %s" % (args.file, exc))
        return EXIT_INPUT
    params = CloneParams(n=index.n, eta=args.eta,
                         epsilon_threshold=args.epsilon)
    results = match(index, fp, params)
    rows = [{"candidateId": r.candidate_id, "epsilon": r.epsilon,
             "etaOverlap": r.eta_overlap} for r in results]
    if args.format == "text":
        for row in rows:
            sys.stdout.write("%s\t%.3f\n" % (row["candidateId"], row["epsilon"]))
    else:
        _emit({"matches": rows})
    return EXIT_OK


# ---------------------------------------------------------------- study


def cmd_study(args):
    params = CloneParams(n=args.ngram, eta=args.eta,
                         epsilon_threshold=args.epsilon)
    config = StudyConfig(params=params, ladder=args.ladder,
                         wall_clock_limit=args.timeout,
                         keyword_path=args.keywords,
                         detector_ids=args.detectors, jobs=args.jobs,
                         seed=args.seed, permutations=args.permutations)
    try:
        result = run_study(args.snippets, args.contracts, config)
    except MissingKeywordFile as exc:
        _diag(str(exc))
        return EXIT_USAGE
    except (IoError, SchemaError) as exc:
        _diag(str(exc))
        return EXIT_INPUT
    for line in result.diagnostics:
        _diag(line)
    if args.format == "text":
        sys.stdout.write(report_text(result) + "\n")
    else:
        _emit(report_json(result))
    return EXIT_OK


# ---------------------------------------------------------------- stats


def _read_pairs(path):
    pairs = []
    for lineno, line in enumerate(_read_text(path).splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if line[0] in "[{":
                row = json.loads(line)
                if isinstance(row, dict):
                    pair = (float(row["v"]), float(row["nr"]))
                else:
                    pair = (float(row[0]), float(row[1]))
            else:
                parts = line.replace(",", " ").split()
                pair = (float(parts[0]), float(parts[1]))
        except (ValueError, KeyError, IndexError) as exc:
            raise SchemaError("%s: line %d: %s" % (path, lineno, exc))
        pairs.append(pair)
    return pairs


def cmd_stats(args):
    try:
        pairs = _read_pairs(args.pairs)
        result = spearman(pairs, permutations=args.permutations,
                          seed=args.seed)
    except (SchemaError, DegenerateSample, ValueError) as exc:
        _diag(str(exc))
        return EXIT_INPUT
    row = {"n": result.n, "rho": result.rho, "pValue": result.p_value,
           "variablePair": result.variable_pair}
    if result.permutation_p_value is not None:
        row["permutationPValue"] = result.permutation_p_value
    if args.format == "text":
        sys.stdout.write("n=%d rho=%.6f p=%.6g\n" % (
            row["n"], row["rho"], row["pValue"]))
    else:
        _emit(row)
    return EXIT_OK


# ----------------------------------------------------------------- main


def _build_parser():
    parser = _Parser(prog="snipscan",
                     description="Solidity snippet analysis and clone search.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("parse", parents=[], help="dump the tolerant AST")
    p.add_argument("file")
    _add_format_flag(p, ("json",))
    p.set_defaults(run=cmd_parse)

    p = subs.add_parser("cpg", help="export the code property graph")
    p.add_argument("file")
    _add_format_flag(p, ("json", "dot"))
    p.set_defaults(run=cmd_cpg)

    p = subs.add_parser("scan", help="run vulnerability detectors")
    p.add_argument("paths", nargs="+", metavar="PATH",
                   help="Solidity files or directories")
    _add_flag(p, "--detectors", _detectors_value, None,
              "comma-separated detector ids (default: all)", "IDS")
    _add_budget_flags(p)
    _add_flag(p, "--jobs", _positive_int, 1, "worker processes", "N")
    _add_format_flag(p, ("json", "text"))
    p.set_defaults(run=cmd_scan)

    p = subs.add_parser("fingerprint", help="fingerprint Solidity sources")
    p.add_argument("paths", nargs="+", metavar="PATH")
    p.add_argument("-o", "--out", default=None,
                   help="also write a tab-separated fingerprint file")
    _add_format_flag(p, ("json", "text"))
    p.set_defaults(run=cmd_fingerprint)

    p = subs.add_parser("index", help="build an n-gram candidate index")
    p.add_argument("fingerprints", help="fingerprint file (JSON or tab-separated)")
    p.add_argument("-o", "--out", required=True, help="index output path")
    _add_flag(p, "--ngram", _positive_int, DEFAULT_NGRAM,
              "n-gram size for the candidate prefilter", "N")
    p.set_defaults(run=cmd_index)

    p = subs.add_parser("match", help="match one source against an index")
    p.add_argument("file", help="Solidity source to look up")
    p.add_argument("index", help="index file built by the index command")
    _add_flag(p, "--eta", _eta_value, DEFAULT_ETA,
              "minimum n-gram containment ratio for candidates", "RATIO")
    _add_flag(p, "--epsilon", _epsilon_value, DEFAULT_EPSILON_THRESHOLD,
              "minimum similarity score to report a match", "SCORE")
    _add_format_flag(p, ("json", "text"))
    p.set_defaults(run=cmd_match)

    p = subs.add_parser("study", help="run the snippet-to-contract study")
    p.add_argument("snippets", help="snippet corpus (JSON lines)")
    p.add_argument("contracts", help="contract corpus (JSON lines)")
    _add_clone_flags(p, STUDY_EPSILON_THRESHOLD)
    _add_budget_flags(p)
    _add_flag(p, "--detectors", _detectors_value, None,
              "comma-separated detector ids (default: all)", "IDS")
    _add_flag(p, "--keywords", str, None,
              "keyword list overriding the shipped one", "FILE")
    _add_flag(p, "--jobs", _positive_int, 1, "worker processes", "N")
    _add_flag(p, "--seed", int, 0, "seed for the permutation test", "N")
    _add_flag(p, "--permutations", int, 0,
              "permutation count for the permutation p-value", "N")
    _add_format_flag(p, ("json", "text"))
    p.set_defaults(run=cmd_study)

    p = subs.add_parser("stats", help="rank correlation on a pairs file")
    p.add_argument("pairs", help="file of (views, contracts) pairs")
    _add_flag(p, "--seed", int, 0, "seed for the permutation test", "N")
    _add_flag(p, "--permutations", int, 0,
              "permutation count for the permutation p-value", "N")
    _add_format_flag(p, ("json", "text"))
    p.set_defaults(run=cmd_stats)

    return parser


def main(argv=None):
    try:
        parser = _build_parser()
        args = parser.parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        _diag(str(exc))
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
