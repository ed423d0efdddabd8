"""Command-line entry point: ``betashift <command> ...``.

Every command prints either plain text or a JSON document holding a run
manifest and the result.  Exit codes: 0 ok, 2 numerically undecided or
malformed input, 3 illegal game move, 4 a hypothesis of the construction
does not hold.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .beta_core import (
    Beta,
    PeriodicStream,
    cylinder_interval,
    greedy_expand,
    orbit,
    parse_beta,
    solve_beta_from_digits,
)
from .errors import (
    AmbiguousDigit,
    BetaShiftError,
    ComparisonUndecided,
    CoverTooLarge,
    FinitenessUndecided,
    IllegalMove,
    NotAdmissible,
    NotConcatenable,
    NotFound,
    NotParryAdmissible,
    PrecisionExhausted,
)
from .frequency import (
    certify_prefix,
    construct_divergent_point,
    divergence_report,
    word_frequency_trace,
)
from .numeric import Interval, decimal_down, decimal_up, exact_str, to_mpq
from .schmidt_game import (
    GameConfig,
    GameTranscript,
    black_strategies,
    explicit_alpha,
    intersect_strategies,
    play,
    rational_below,
    replay,
    verify_avoidance,
    white_avoidance_strategy,
)
from .sft_cantor import SftSpec, build_cover, contained_in_shift, witness_excluded_word
from .transversality import DEFAULT_DELTA0, DEFAULT_TRUNCATION, a_zero_check, falsify, scan

EXIT_OK, EXIT_UNDECIDED, EXIT_ILLEGAL, EXIT_HYPOTHESIS = 0, 2, 3, 4

MANIFEST_SCHEMA = "betashift.run/1"


@dataclass
class RunManifest:
    """Command, parameters, seed and version, plus the digest of the result."""

    command: str
    params: dict
    seed: int | None = None
    version: str = __version__
    output_digest: str = ""
    extra: dict = field(default_factory=dict)

    def seal(self, result) -> "RunManifest":
        self.output_digest = digest_of(result)
        return self

    def to_json(self):
        return {
            "schema": MANIFEST_SCHEMA,
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "version": self.version,
            "output_digest": self.output_digest,
        }


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest_of(obj) -> str:
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


class UsageError(BetaShiftError):
    """Malformed command-line input."""


# -- argument parsing helpers ---------------------------------------------------------

def parse_word(text: str) -> tuple:
    """'1,0,1' or '101' (single-digit alphabet) into a digit tuple."""
    text = text.strip()
    if not text:
        return ()
    try:
        if "," in text:
            return tuple(int(t) for t in text.split(","))
        return tuple(int(c) for c in text)
    except ValueError:
        raise UsageError(f"malformed digit word {text!r}") from None


def parse_number(text: str):
    try:
        return to_mpq(text)
    except (ValueError, TypeError, ZeroDivisionError):
        raise UsageError(f"malformed number {text!r}") from None


def resolve_beta(args) -> Beta:
    digits = getattr(args, "beta_digits", None)
    if digits:
        return solve_beta_from_digits(parse_word(digits))
    text = getattr(args, "beta", None)
    if text is None:
        raise UsageError("give --beta or --beta-digits")
    try:
        return parse_beta(text)
    except (ValueError, TypeError):
        raise UsageError(f"malformed base {text!r}") from None


def load_sft(args, beta: Beta | None = None) -> SftSpec:
    if getattr(args, "sft", None):
        return SftSpec.from_json(json.loads(Path(args.sft).read_text()))
    words = [parse_word(w) for w in (args.forbid or [])]
    words = [w for w in words if w]
    amax = args.alphabet_max
    if amax is None:
        amax = beta.alphabet_max if beta is not None else max((max(w) for w in words), default=1)
    return SftSpec(amax, words)


def emit(args, result, manifest: RunManifest, plain: str | None = None):
    manifest.seal(result)
    if getattr(args, "format", "json") == "plain" and plain is not None:
        text = plain
    else:
        text = json.dumps({"manifest": manifest.to_json(), "result": result}, sort_keys=True, indent=2)
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _params(args, skip=("func", "format", "out")):
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# -- commands -----------------------------------------------------------------------------

def cmd_expand(args) -> int:
    beta = resolve_beta(args)
    x = parse_number(args.x)
    if not 0 <= x <= 1:
        raise UsageError(f"x = {args.x} is outside [0, 1]")
    if args.x_width:
        w = parse_number(args.x_width)
        point = Interval(max(x - w, 0), min(x + w, 1))
    else:
        point = x
    digits = greedy_expand(point, beta, args.n)
    encl = orbit(point, beta, args.n) if x < 1 or args.x_width else []
    sep = "," if beta.alphabet_max > 9 else ""
    result = {
        "x": args.x,
        "beta": beta.to_json(),
        "digits": list(digits),
        "orbit": [e.to_json(20) for e in encl],
    }
    plain = sep.join(map(str, digits))
    emit(args, result, RunManifest("expand", _params(args)), plain)
    return EXIT_OK


def cmd_solve_beta(args) -> int:
    pre = parse_word(args.digits)
    if args.period:
        s = PeriodicStream(pre, parse_word(args.period))
    else:
        s = pre
    beta = solve_beta_from_digits(s)
    d1 = beta.expansion_of_one()
    check = d1.prefix(max(len(pre) + len(parse_word(args.period or "")), 1) * 2)
    result = {
        "beta": beta.to_json(args.digits_out),
        "expansion_of_one": list(check),
        "minimal_polynomial": [exact_str(c) for c in beta.field.poly],
    }
    plain = decimal_down(beta.enclosure(4 * args.digits_out + 64).lo, args.digits_out)
    emit(args, result, RunManifest("solve-beta", _params(args)), plain)
    return EXIT_OK


def cmd_cylinder(args) -> int:
    beta = resolve_beta(args)
    cyl = cylinder_interval(parse_word(args.word), beta)
    result = {
        "beta": beta.to_json(),
        "word": list(cyl.word),
        "interval": cyl.bounds().to_json(20),
        "length": cyl.length.to_json(20),
        "suffix_state": cyl.state,
        "full": bool(cyl.is_full),
    }
    lo, hi = result["interval"]
    emit(args, result, RunManifest("cylinder", _params(args)), f"[{lo}, {hi})")
    return EXIT_OK


def cmd_cover(args) -> int:
    beta = resolve_beta(args)
    sft = load_sft(args, beta)
    cover = build_cover(sft, beta, args.generation)
    result = {
        "cover": cover.to_json(20),
        "count": len(cover),
        "total_length": cover.total_length().to_json(20),
        "contained_in_shift": contained_in_shift(sft, beta, args.generation),
    }
    try:
        result["witness"] = list(witness_excluded_word(sft, beta, args.generation))
    except NotFound:
        result["witness"] = None
    emit(args, result, RunManifest("cover", _params(args)))
    return EXIT_OK


def _targets(args):
    """(beta, sft) pairs from --target, or the single --beta/--forbid target."""
    if args.target:
        out = []
        for t in args.target:
            label, _, words = t.partition("/")
            beta = parse_beta(label)
            forb = [parse_word(w) for w in words.split(";") if w.strip()]
            out.append((beta, SftSpec(beta.alphabet_max, forb)))
        return out
    beta = resolve_beta(args)
    if args.forbid is None and not args.sft:
        args.forbid = ["1,1"]
    return [(beta, load_sft(args, beta))]


def _load_config(args):
    return json.loads(Path(args.config).read_text()) if args.config else {}


def _verify_all(transcript: GameTranscript, targets):
    out = []
    for item in targets:
        beta = Beta.from_json(item["beta"])
        sft = SftSpec.from_json(item["sft"])
        cover = build_cover(sft, beta, item["generation"])
        v = verify_avoidance(transcript, beta, cover, item["orbit_len"], refine_generation=item.get("refine_generation"))
        out.append(dict(v, beta=item["beta"], sft=item["sft"]))
    return out


def _summary(transcript: GameTranscript, verdict, elapsed_rounds: int) -> str:
    lines = [f"rounds: {elapsed_rounds}  alpha: {exact_str(transcript.config.alpha)}  "
             f"gamma: {exact_str(transcript.config.gamma)}"]
    white = transcript.strategies.get("white", {})
    parts = white.get("parts", [white])
    for p, v in zip(parts, verdict):
        name = v["beta"].get("name") or v["beta"]["enclosure"][0]
        lines.append(f"beta={name} M={p.get('M')} k={p.get('k')} -> {v['status']} margin={v['margin']} "
                     f"(worst orbit point n={v['worst_n']}, cover generation {v['generation']})")
    return "\n".join(lines)


def cmd_game(args) -> int:
    if args.replay:
        args.transcript = args.replay
        return cmd_replay(args)
    conf = _load_config(args)
    for key in ("rounds", "gamma", "seed", "black", "cover_generation", "orbit_len", "refine_generation", "alpha"):
        if key in conf and getattr(args, key) == PARSER_DEFAULTS.get(key):
            setattr(args, key, conf[key])
    targets = _targets(args)
    whites = [white_avoidance_strategy(b, s) for b, s in targets]
    if len(whites) == 1:
        w = whites[0]
        white = w
        alpha = explicit_alpha(w.beta, w.M, w.k)
    else:
        white = intersect_strategies([(w, explicit_alpha(w.beta, w.M, w.k)) for w in whites])
        alpha = white.alpha
    alpha = rational_below(alpha) if args.alpha is None else parse_number(str(args.alpha))
    beta0 = targets[0][0] if len(targets) == 1 else None
    config = GameConfig(alpha, parse_number(str(args.gamma)), int(args.rounds), beta0, int(args.seed))
    cover0 = build_cover(targets[0][1], targets[0][0], args.cover_generation) if args.black == "adversarial" else None
    black = black_strategies(int(args.seed), cover0)[args.black]
    transcript = play(white, black, config)
    checks = [{"beta": b.to_json(), "sft": s.to_json(), "generation": args.cover_generation,
              "orbit_len": args.orbit_len, "refine_generation": args.refine_generation} for b, s in targets]
    transcript.verdict = _verify_all(transcript, checks)
    doc = transcript.to_json()
    if args.transcript_out:
        Path(args.transcript_out).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    result = {
        "verdict": transcript.verdict,
        "status": "PASS" if all(v["status"] == "PASS" for v in transcript.verdict) else "FAIL",
        "digest": transcript.digest(),
        "transcript": args.transcript_out,
        "strategies": transcript.strategies,
    }
    emit(args, result, RunManifest("game", _params(args), int(args.seed)),
         _summary(transcript, transcript.verdict, config.rounds) + f"\nverdict: {result['status']}\ndigest: {result['digest']}")
    return EXIT_OK


def cmd_replay(args) -> int:
    doc = json.loads(Path(args.transcript).read_text())
    if doc.get("schema") != "betashift.transcript/1":
        raise UsageError("not a transcript document")
    t = GameTranscript.from_json(doc)
    ok, reason, idx = replay(t)
    if not ok:
        move = t.moves[idx] if idx is not None and idx < len(t.moves) else None
        raise IllegalMove(reason, move, f"move {idx}")
    checks = [{"beta": v["beta"], "sft": v["sft"], "generation": v["generation"], "orbit_len": v["orbit_len"],
              "refine_generation": v.get("refine_generation")} for v in t.verdict]
    fresh = _verify_all(t, checks)
    stored_digest = t.digest()
    t.verdict = fresh
    same = t.digest() == stored_digest
    result = {
        "legal": True,
        "verdict": fresh,
        "status": "PASS" if same and all(v["status"] == "PASS" for v in fresh) else "FAIL",
        "verdict_reproduced": same,
        "digest": stored_digest,
    }
    emit(args, result, RunManifest("replay", _params(args)),
         f"replay: {result['status']}\ndigest: {stored_digest}")
    return EXIT_OK


def cmd_scan(args) -> int:
    beta = None if args.mode == "free-pm1" else resolve_beta(args)
    rep = scan(beta, args.samples, args.grid, args.seed, coefficient_mode=args.mode,
               truncation=args.truncation, delta0=parse_number(args.delta0))
    result = rep.to_json()
    if args.a_zero and beta is not None and args.samples > 0:
        mx, hi = a_zero_check(beta, args.samples, args.grid, args.seed, args.truncation)
        result["a_zero"] = {"max_g_prime": repr(mx), "certified_upper": decimal_up(hi, 20)}
    result["digest"] = digest_of(result)
    emit(args, result, RunManifest("scan", _params(args), args.seed))
    return EXIT_OK


def cmd_falsify(args) -> int:
    beta = resolve_beta(args)
    found = falsify(beta, args.budget, args.seed, parse_number(args.delta0))
    result = {"beta": beta.to_json(), "budget": args.budget, "counterexample": found,
              "verdict": "counterexample" if found else "none found"}
    emit(args, result, RunManifest("falsify", _params(args), args.seed))
    return EXIT_OK


def cmd_frequency(args) -> int:
    beta = resolve_beta(args)
    word = parse_word(args.word)
    if not word:
        raise UsageError("--word must be non-empty")
    if args.construct:
        rep = divergence_report(beta, word, parse_number(args.ratio), args.n,
                                parse_word(args.block) if args.block else None)
        s = construct_divergent_point(beta, word, parse_number(args.ratio),
                                      parse_word(args.block) if args.block else None)
        rep["certified_prefix"] = min(args.n, args.certify)
        if not certify_prefix(s, beta, rep["certified_prefix"]):
            raise NotConcatenable("emitted prefix left the beta-shift")
        trace_json = rep["trace"]
        if args.csv:
            trace = word_frequency_trace(s, word, trace_json["n"])
            Path(args.csv).write_text(trace.to_csv())
        result = rep
    else:
        if args.x is None:
            raise UsageError("give --construct or --x")
        digits = greedy_expand(parse_number(args.x), beta, args.n)
        step = max(1, args.n // max(args.checkpoints, 1))
        cps = sorted(set(range(step, args.n + 1, step)) | {args.n})
        trace = word_frequency_trace(digits, word, cps)
        if args.csv:
            Path(args.csv).write_text(trace.to_csv())
        result = {"beta": beta.to_json(), "x": args.x, "trace": trace.to_json()}
    emit(args, result, RunManifest("frequency", _params(args)))
    return EXIT_OK


# -- parser ---------------------------------------------------------------------------------

PARSER_DEFAULTS = {
    "rounds": 200, "gamma": "3/4", "seed": 0, "black": "center", "cover_generation": 10,
    "orbit_len": 100, "refine_generation": None, "alpha": None,
}


def _beta_args(p, default=None):
    p.add_argument("--beta", default=default, help="decimal, p/q, 'golden', 'tribonacci' or 'digits:1,1'")
    p.add_argument("--beta-digits", help="beta as the Parry root of this digit word")


def _out_args(p, formats=("json",)):
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--out", help="write the output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="betashift", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="greedy digits and orbit of x")
    p.add_argument("--x", required=True)
    p.add_argument("--x-width", help="treat x as the interval [x - w, x + w]")
    p.add_argument("--n", type=int, required=True)
    _beta_args(p)
    _out_args(p, ("plain", "json"))
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("solve-beta", help="beta > 1 from d(1, beta)")
    p.add_argument("--digits", required=True, help="finite word, or preperiod when --period is given")
    p.add_argument("--period")
    p.add_argument("--digits-out", type=int, default=30)
    _out_args(p, ("plain", "json"))
    p.set_defaults(func=cmd_solve_beta)

    p = sub.add_parser("cylinder", help="interval of a cylinder")
    p.add_argument("--word", required=True)
    _beta_args(p)
    _out_args(p, ("plain", "json"))
    p.set_defaults(func=cmd_cylinder)

    def sft_args(q):
        q.add_argument("--forbid", action="append", help="forbidden word, repeatable ('1,1' or '11')")
        q.add_argument("--alphabet-max", type=int)
        q.add_argument("--sft", help="SftSpec JSON file")

    p = sub.add_parser("cover", help="generation-g cover of pi(Sigma_A)")
    _beta_args(p)
    sft_args(p)
    p.add_argument("--generation", type=int, default=10)
    _out_args(p)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("game", help="play and verify an avoidance game")
    _beta_args(p, "1.9")
    sft_args(p)
    p.add_argument("--target", action="append", help="BETA/w1;w2 (repeatable, combines strategies)")
    p.add_argument("--config", help="JSON file with rounds, gamma, seed, black, ...")
    p.add_argument("--black", choices=("center", "random", "adversarial"), default=PARSER_DEFAULTS["black"])
    p.add_argument("--rounds", type=int, default=PARSER_DEFAULTS["rounds"])
    p.add_argument("--gamma", default=PARSER_DEFAULTS["gamma"])
    p.add_argument("--alpha", default=None, help="override the explicit alpha")
    p.add_argument("--seed", type=int, default=PARSER_DEFAULTS["seed"])
    p.add_argument("--cover-generation", type=int, default=PARSER_DEFAULTS["cover_generation"])
    p.add_argument("--orbit-len", type=int, default=PARSER_DEFAULTS["orbit_len"])
    p.add_argument("--refine-generation", type=int, default=None)
    p.add_argument("--transcript-out", help="write the transcript JSON here")
    p.add_argument("--replay", help="re-validate this transcript instead of playing")
    _out_args(p, ("plain", "json"))
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("replay", help="re-validate a transcript")
    p.add_argument("transcript")
    _out_args(p, ("plain", "json"))
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("scan", help="grid scan for transversality")
    _beta_args(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--grid", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("beta-shift-pairs", "free-pm1"), default="beta-shift-pairs")
    p.add_argument("--truncation", type=int, default=DEFAULT_TRUNCATION)
    p.add_argument("--delta0", default=exact_str(DEFAULT_DELTA0))
    p.add_argument("--a-zero", action="store_true", help="also check g' < 0 for pairs with a = 0")
    _out_args(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("falsify", help="search for a transversality counterexample")
    _beta_args(p)
    p.add_argument("--budget", type=int, default=100000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--delta0", default=exact_str(DEFAULT_DELTA0))
    _out_args(p)
    p.set_defaults(func=cmd_falsify)

    p = sub.add_parser("frequency", help="word frequencies along an expansion")
    _beta_args(p)
    p.add_argument("--word", required=True)
    p.add_argument("--construct", action="store_true", help="use the divergent construction")
    p.add_argument("--ratio", default="2")
    p.add_argument("--block", help="repeated block (default: word padded with zeros)")
    p.add_argument("--x", help="expand this point instead of constructing one")
    p.add_argument("--n", type=int, default=10 ** 6)
    p.add_argument("--checkpoints", type=int, default=100)
    p.add_argument("--certify", type=int, default=10 ** 5, help="admissibility-check this many digits")
    p.add_argument("--csv", help="write the trace as CSV")
    _out_args(p)
    p.set_defaults(func=cmd_frequency)
    return ap


UNDECIDED = (AmbiguousDigit, ComparisonUndecided, FinitenessUndecided, PrecisionExhausted, UsageError,
             NotAdmissible, NotParryAdmissible, CoverTooLarge)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IllegalMove as exc:
        print(f"error: illegal move ({exc})", file=sys.stderr)
        return EXIT_ILLEGAL
    except (NotFound, NotConcatenable) as exc:
        print(f"error: hypothesis fails: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except UNDECIDED as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED


if __name__ == "__main__":
    sys.exit(main())
