import os
import sys
import json
import argparse
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence
from datetime import datetime, timezone
from dataclasses import dataclass, field
from dotenv import load_dotenv

from errors import CanrpError, InputError, VerificationFailure
from structures import from_json, rational_to_json, require_valid, to_json, validate
from category import Coloring, embedding_from_map, enumerate_embeddings
from transfers import FUNCTORS, apply_functor, compress_signature, dagger, encoding_signature, star
from canonical import (
    CanonicalWitness,
    FAILS,
    INCONCLUSIVE,
    WitnessEngine,
    erc_report,
    is_canonical_witness,
    verify_can_arrow,
)
from preadjunction import PreAdjunction, as_scale, is_tight, tight_extension
import preadjunction
import diagram_transfer

TOOL_NAME = "canrp"


def get_version() -> str:
    """Get version from deploy/version.txt."""
    try:
        version_file = os.path.join(os.path.dirname(os.path.abspath(__file__)), "deploy", "version.txt")
        if os.path.exists(version_file):
            with open(version_file, "r", encoding="utf-8") as f:
                version = f.read().strip()
                if version:
                    return version
    except OSError:
        pass
    return "1.0.0"


# ==============================
#  Configuration Class
# ==============================
class Config:
    """Configuration management class."""

    def __init__(self, overrides: Optional[dict] = None):
        load_dotenv()

        self.max_colorings = self._int_env("CANRP_MAX_COLORINGS", 1000000)
        self.max_points = self._int_env("CANRP_MAX_POINTS", 4096)
        self.workers = self._int_env("CANRP_WORKERS", 1)
        self.quasiorder_cap = self._int_env("CANRP_QUASIORDER_CAP", 4)
        self.log_dir = os.getenv("CANRP_LOG_DIR", "logs")

        # Command-line flags win over the environment
        for key, value in (overrides or {}).items():
            if value is not None:
                setattr(self, key, value)

        self._validate()
        self._ensure_log_dir()

    @staticmethod
    def _int_env(name: str, default: int) -> int:
        raw = os.getenv(name)
        if raw is None or raw.strip() == "":
            return default
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"{name} must be an integer, got '{raw}'")

    def _validate(self):
        """Validate budgets and pool width."""
        if self.max_colorings < 1:
            raise ValueError("CANRP_MAX_COLORINGS must be positive")
        if self.max_points < 1:
            raise ValueError("CANRP_MAX_POINTS must be positive")
        if self.workers < 1:
            raise ValueError("CANRP_WORKERS must be at least 1")
        if self.quasiorder_cap < 1:
            raise ValueError("CANRP_QUASIORDER_CAP must be positive")

    def _ensure_log_dir(self):
        """Create log directory if it doesn't exist."""
        os.makedirs(self.log_dir, exist_ok=True)

    def as_dict(self) -> dict:
        """Budgets written into reports; the pool width is left out so reports match at any worker count."""
        return {
            "max_colorings": self.max_colorings,
            "max_points": self.max_points,
            "quasiorder_cap": self.quasiorder_cap,
        }

    @property
    def run_log_path(self) -> str:
        return f"{self.log_dir}/run.log"

    @property
    def app_log_path(self) -> str:
        return f"{self.log_dir}/app.log"


# ==============================
#  Log Manager Class
# ==============================
class LogManager:
    """Manages all logging operations."""

    def __init__(self, config: Config):
        self.config = config

    def write_run(self, command: str, status: str, details: str = ""):
        """Write audit entry for a verification verdict."""
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "command": command,
            "status": status,
            "details": details,
        }
        self._write_to_file(self.config.run_log_path, log_entry)

    def write_app_log(self, data: dict):
        """Write application log entry."""
        if "timestamp" not in data:
            data["timestamp"] = datetime.now(timezone.utc).isoformat()
        self._write_to_file(self.config.app_log_path, data)

    def log_command_entry(self, command: str, argv: Sequence[str], status: str = "received"):
        """Log the command line before any input is read."""
        log_entry = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "command": command,
            "argv": list(argv),
            "status": status,
        }
        self._write_to_file(self.config.app_log_path, log_entry)

    def get_history(self, command: Optional[str] = None, limit: int = 10) -> List[dict]:
        """Read run log history, newest first."""
        try:
            with open(self.config.run_log_path, "r", encoding="utf-8") as f:
                logs = [json.loads(line) for line in f if line.strip()]

            if command:
                logs = [log for log in logs if log.get("command") == command]

            return logs[-limit:][::-1]
        except FileNotFoundError:
            return []

    def _write_to_file(self, filepath: str, data: dict):
        with open(filepath, "a", encoding="utf-8") as f:
            f.write(json.dumps(data, ensure_ascii=False) + "\n")


# ==============================
#  Input helpers
# ==============================
def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError:
        raise InputError(f"Input file not found: {path}")
    except json.JSONDecodeError as e:
        raise InputError(f"Malformed JSON in {path}: {e}")


def load_structures(path: str, indexing: int = 0) -> list:
    """One structure per file, or an array of structures."""
    data = load_json(path)
    items = data if isinstance(data, list) else [data]
    return [from_json(item, indexing) for item in items]


def load_structure(path: str, indexing: int = 0):
    items = load_structures(path, indexing)
    if len(items) != 1:
        raise InputError(f"{path} must hold exactly one structure, found {len(items)}")
    return items[0]


def load_valid(path: str, indexing: int = 0, role: str = "structure"):
    return require_valid(load_structure(path, indexing), f"{role} in {path}")


def parse_ints(text: Optional[str], offset: int = 0) -> List[int]:
    if text is None or text.strip() == "":
        return []
    try:
        return [int(v) - offset for v in text.split(",")]
    except ValueError:
        raise InputError(f"Expected a comma-separated list of integers, got '{text}'")


def parse_scale(text: str) -> tuple:
    try:
        return as_scale(Fraction(v.strip()) for v in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"Expected a comma-separated list of rationals, got '{text}'")


# ==============================
#  Command handlers
# ==============================
@dataclass
class Outcome:
    result: object
    stats: dict = field(default_factory=dict)
    exit_code: int = 0
    status: str = "ok"


def cmd_validate(args, config: Config) -> Outcome:
    reports = []
    for s in load_structures(args.input, args.indexing):
        reports.append({"kind": s.kind.value, "n": s.n, **validate(s).to_dict()})
    if all(r["ok"] for r in reports):
        return Outcome({"structures": reports})
    axioms = sorted({v["axiom"] for r in reports for v in r["violations"]})
    print(f"Invalid structure: axioms violated: {', '.join(axioms)}", file=sys.stderr)
    return Outcome({"structures": reports}, exit_code=1, status="invalid")


def cmd_hom(args, config: Config) -> Outcome:
    a = load_valid(args.source, args.indexing, "source")
    b = load_valid(args.target, args.indexing, "target")
    maps = [e.to_dict() for e in enumerate_embeddings(a, b)]
    return Outcome({"count": len(maps), "embeddings": maps}, {"embeddings": len(maps)})


def cmd_functor(args, config: Config) -> Outcome:
    s = load_valid(args.input, args.indexing)
    return Outcome(to_json(apply_functor(args.name, args.direction, s)))


def cmd_encode(args, config: Config) -> Outcome:
    s = load_valid(args.input, args.indexing)
    if args.direction == "dagger":
        sig = encoding_signature(s.signature, s.labels, config.quasiorder_cap)
        return Outcome({"structure": to_json(dagger(s, config.quasiorder_cap)), "signature": sig.to_list()})
    return Outcome({"structure": to_json(star(s, config.quasiorder_cap))})


def cmd_compress(args, config: Config) -> Outcome:
    parts = load_structures(args.input, args.indexing)
    for p in parts:
        require_valid(p, f"hypergraph in {args.input}")
    result = compress_signature(parts)
    return Outcome({**result.to_dict(), "reducts": [to_json(r) for r in result.reducts]})


def _can_inputs(args):
    a = load_valid(args.a, args.indexing, "A")
    b = load_valid(args.b, args.indexing, "B")
    c = load_valid(args.c, args.indexing, "C")
    return a, b, c


def cmd_can(args, config: Config) -> Outcome:
    a, b, c = _can_inputs(args)
    if args.action == "verify":
        verdict = verify_can_arrow(a, b, c, config.max_colorings, config.workers, args.witnesses)
        data = verdict.to_dict()
        stats = data.pop("stats")
        if verdict.status == FAILS:
            raise VerificationFailure("Found a coloring with no canonical witness", data, stats)
        if verdict.status == INCONCLUSIVE:
            return Outcome(data, stats, exit_code=3, status=INCONCLUSIVE)
        return Outcome(data, stats, status=verdict.status)

    engine = WitnessEngine(a, b, c)
    colors = parse_ints(args.colors)
    chi = Coloring(tuple(engine.hom_ac), tuple(colors))
    if args.action == "search":
        wit = engine.find(chi)
        if wit is None:
            raise VerificationFailure("No canonical witness for this coloring", {"witness": None}, status="no-witness")
        return Outcome({"witness": wit.to_dict()})

    w = embedding_from_map(b, c, parse_ints(args.w, args.indexing))
    wit = CanonicalWitness(w, tuple(parse_ints(args.positions, args.indexing)))
    result = {"canonical": is_canonical_witness(chi, wit, engine.hom_ab), **wit.to_dict()}
    if not result["canonical"]:
        raise VerificationFailure("The candidate is not a canonical witness", result, status="not-canonical")
    return Outcome(result)


def cmd_erc(args, config: Config) -> Outcome:
    report = erc_report(args.k, args.m, args.n_max, config.max_colorings, config.workers)
    stats = {"colorings_examined": report.pop("colorings_examined")}
    if report["n"] is None:
        raise VerificationFailure(f"No n <= {args.n_max} works", report, stats, status="not-found")
    return Outcome(report, stats)


def cmd_preadj(args, config: Config) -> Outcome:
    if args.action == "tight":
        scale = parse_scale(args.scale)
        extension = tight_extension(scale)
        return Outcome({
            "tight": is_tight(scale),
            "extension": None if extension is None else [rational_to_json(v) for v in extension],
        })
    if args.action == "sweep":
        scales = [parse_scale(text) for text in args.scales.split(";")]
        report = preadjunction.sweep(scales, args.max_size, config.workers, config.max_points)
        if not report["ok"]:
            raise VerificationFailure("A compatibility check or witness transfer failed", report)
        return Outcome(report)

    adj = PreAdjunction(parse_scale(args.scale), config.max_points)
    if args.action == "fobj":
        return Outcome(to_json(adj.f_obj(load_valid(args.files[0], args.indexing, "metric space"))))
    if args.action == "gobj":
        g = adj.g_obj(load_valid(args.files[0], args.indexing, "poset"))
        return Outcome(to_json(g), {"points": g.n})
    if len(args.files) != 2:
        raise InputError("preadj phi needs a metric space file and a poset file")
    m = load_valid(args.files[0], args.indexing, "metric space")
    p = load_valid(args.files[1], args.indexing, "poset")
    u = embedding_from_map(adj.f_obj(m), p, parse_ints(args.map, args.indexing))
    return Outcome(adj.phi(m, u).to_dict())


def cmd_transfer(args, config: Config) -> Outcome:
    if args.files:
        if len(args.files) != 3:
            raise InputError("transfer demo needs the files A, B and C")
        a, b, c = (load_valid(path, args.indexing) for path in args.files)
        result = diagram_transfer.transfer_pipeline(a, b, c, max_colorings=config.max_colorings).to_dict()
        return Outcome(result, {"colorings_examined": result["colorings"]})
    report = diagram_transfer.sweep(args.max_a, args.max_b, args.max_c, config.workers, config.max_colorings)
    stats = {"colorings_examined": report["colorings"]}
    if not report["ok"]:
        raise VerificationFailure("A transferred witness failed to validate", report, stats)
    return Outcome(report, stats)


def cmd_history(args, config: Config, log_manager: LogManager) -> Outcome:
    return Outcome({"history": log_manager.get_history(args.command_name, args.limit)})


HANDLERS: Dict[str, Callable] = {
    "validate": cmd_validate,
    "hom": cmd_hom,
    "functor": cmd_functor,
    "encode": cmd_encode,
    "compress": cmd_compress,
    "can": cmd_can,
    "erc": cmd_erc,
    "preadj": cmd_preadj,
    "transfer": cmd_transfer,
}


# ==============================
#  Argument parsing
# ==============================
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", type=str, default=None, help="write the JSON report here instead of stdout")
    common.add_argument("--max-colorings", type=int, default=None, help="coloring budget (CANRP_MAX_COLORINGS)")
    common.add_argument("--max-points", type=int, default=None, help="size cap for G(P) (CANRP_MAX_POINTS)")
    common.add_argument("--workers", type=int, default=None, help="process pool width (CANRP_WORKERS)")
    common.add_argument("--indexing", type=int, choices=[0, 1], default=0,
                        help="index base of positions in input files and lists")

    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Canonical Ramsey toolkit for finite ordered structures")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {get_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check structure axioms")
    p.add_argument("--input", required=True)

    p = sub.add_parser("hom", parents=[common], help="list embeddings A -> B")
    p.add_argument("source")
    p.add_argument("target")

    p = sub.add_parser("functor", parents=[common], help="apply an isomorphism functor")
    p.add_argument("name", choices=sorted(FUNCTORS))
    p.add_argument("direction")
    p.add_argument("--input", required=True)

    p = sub.add_parser("encode", parents=[common], help="dagger / star encoding")
    p.add_argument("direction", choices=["dagger", "star"])
    p.add_argument("--input", required=True)

    p = sub.add_parser("compress", parents=[common], help="compress the signature of hypergraphs")
    p.add_argument("--input", required=True)

    p = sub.add_parser("can", parents=[common], help="canonical witnesses and arrows")
    p.add_argument("action", choices=["check", "search", "verify"])
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("c")
    p.add_argument("--colors", help="comma-separated colors aligned with hom(A, C)")
    p.add_argument("--w", help="map of the witness embedding B -> C")
    p.add_argument("--positions", default="", help="witness positions P of A")
    p.add_argument("--witnesses", action="store_true", help="include a witness for every coloring")

    p = sub.add_parser("erc", parents=[common], help="canonization numbers for chains")
    p.add_argument("k", type=int)
    p.add_argument("m", type=int)
    p.add_argument("n_max", type=int)

    p = sub.add_parser("preadj", parents=[common], help="the Met(S) / Pos pre-adjunction")
    p.add_argument("action", choices=["fobj", "gobj", "phi", "tight", "sweep"])
    p.add_argument("files", nargs="*")
    p.add_argument("--scale", default="0,1", help="comma-separated tight set, e.g. 0,1,2")
    p.add_argument("--scales", default="0,1;0,1,2", help="semicolon-separated scales for sweep")
    p.add_argument("--max-size", type=int, default=2)
    p.add_argument("--map", help="map of u: F(M) -> P for phi")

    p = sub.add_parser("transfer", parents=[common], help="binary-diagram witness transfer")
    p.add_argument("action", choices=["demo"])
    p.add_argument("files", nargs="*")
    p.add_argument("--max-a", type=int, default=2)
    p.add_argument("--max-b", type=int, default=3)
    p.add_argument("--max-c", type=int, default=4)

    p = sub.add_parser("history", parents=[common], help="recent verdicts, newest first")
    p.add_argument("--command", dest="command_name", default=None)
    p.add_argument("--limit", type=int, default=10)
    return parser


# ==============================
#  Report assembly
# ==============================
def build_report(config: Config, command: str, outcome: Outcome) -> dict:
    return {
        "tool": TOOL_NAME,
        "version": get_version(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "command": command,
        "config": config.as_dict(),
        "stats": outcome.stats,
        "result": outcome.result,
    }


def emit_report(report: dict, output: Optional[str]):
    text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False)
    if output:
        with open(output, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        print(text)


def command_label(args) -> str:
    action = getattr(args, "action", None) or getattr(args, "direction", None)
    return f"{args.command} {action}" if action and args.command != "functor" else args.command


# ==============================
#  Entry point
# ==============================
def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)

    try:
        config = Config({
            "max_colorings": args.max_colorings,
            "max_points": args.max_points,
            "workers": args.workers,
        })
    except ValueError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return 1

    log_manager = LogManager(config)
    label = command_label(args)
    log_manager.log_command_entry(label, argv)

    try:
        if args.command == "history":
            outcome = cmd_history(args, config, log_manager)
        else:
            outcome = HANDLERS[args.command](args, config)
            log_manager.write_run(label, outcome.status, json.dumps(outcome.stats, sort_keys=True))
        log_manager.write_app_log({"command": label, "status": outcome.status, "exit_code": outcome.exit_code})
        emit_report(build_report(config, label, outcome), args.output)
        return outcome.exit_code
    except VerificationFailure as e:
        log_manager.write_run(label, e.status, json.dumps(e.stats, sort_keys=True))
        log_manager.write_app_log({"command": label, "status": e.status, "exit_code": e.exit_code})
        emit_report(build_report(config, label, Outcome(e.result, e.stats, e.exit_code, e.status)), args.output)
        print(f"Verification failed: {e.detail}", file=sys.stderr)
        return e.exit_code
    except CanrpError as e:
        log_manager.write_run(label, "error", e.detail)
        log_manager.write_app_log({"command": label, "status": "error", **e.to_dict()})
        emit_report(build_report(config, label, Outcome(e.to_dict(), exit_code=e.exit_code)), args.output)
        print(f"Error: {e.detail}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        log_manager.write_app_log({"command": label, "status": "error", "error": type(e).__name__, "detail": str(e)})
        print(f"Unexpected error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
