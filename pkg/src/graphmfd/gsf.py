"""GSF, a line-oriented text format for graph structures.

::

    # comment
    piece X orientable genus=0 boundary=1 ends=0 cones=2,3,7
    solidtorus V meridian=1,0
    k2xi K [fibration=F1]
    edge e X:0 V:0 matrix=1,0,0,-1 [reversing]
    ray r attach=Y:1 period=2 [entry=a,b,c,d]
      piece orientable genus=0 boundary=2 ends=0 cones=none matrix=1,0,0,-1
      piece orientable genus=0 boundary=2 ends=0 cones=3 matrix=0,1,1,0

Slots are 0-based positions.  Matrices are listed row by row and act on
column vectors (section, fiber).
"""
from __future__ import annotations

from .graph import GraphStructure, PeriodicRay, TorusEdge
from .orbifold import BaseOrbifold, OrbifoldError
from .seifert import FiberedPiece, K2IPiece, Mat2, PieceError, SolidTorusPiece


class ParseError(ValueError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason


def _ints(text: str, n: int | None, lineno: int, what: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",")]
    except ValueError:
        raise ParseError(lineno, f"bad {what} {text!r}") from None
    if n is not None and len(values) != n:
        raise ParseError(lineno, f"{what} needs {n} integers, got {text!r}")
    return values


def _matrix(text: str, lineno: int) -> Mat2:
    m = Mat2(*_ints(text, 4, lineno, "matrix"))
    if m.det != -1:
        raise ParseError(lineno, f"determinant must be -1, got {m.det} for matrix {text}")
    return m


def _options(tokens: list[str], lineno: int, allowed: set[str], flags=()) -> dict:
    opts = {}
    for tok in tokens:
        if tok in flags:
            opts[tok] = True
            continue
        key, sep, value = tok.partition("=")
        if not sep or key not in allowed:
            raise ParseError(lineno, f"unexpected token {tok!r}")
        if key in opts:
            raise ParseError(lineno, f"repeated field {key!r}")
        opts[key] = value
    return opts


def _base(tokens: list[str], lineno: int, extra=()) -> tuple[BaseOrbifold, dict]:
    orientable = True
    if tokens and tokens[0] in ("orientable", "nonorientable"):
        orientable = tokens[0] == "orientable"
        tokens = tokens[1:]
    opts = _options(tokens, lineno, {"genus", "boundary", "ends", "cones", *extra})
    missing = {"genus", "boundary", "ends", "cones"} - opts.keys()
    if missing:
        raise ParseError(lineno, f"missing field(s) {', '.join(sorted(missing))}")
    genus, boundary, ends = (_ints(opts[k], 1, lineno, k)[0]
                             for k in ("genus", "boundary", "ends"))
    cones = () if opts["cones"] == "none" else _ints(opts["cones"], None, lineno, "cones")
    try:
        return BaseOrbifold(orientable, genus, boundary, ends, tuple(cones)), opts
    except OrbifoldError as exc:
        raise ParseError(lineno, str(exc)) from None


def _endpoint(text: str, lineno: int) -> tuple[str, int]:
    pid, sep, slot = text.rpartition(":")
    if not sep or not pid:
        raise ParseError(lineno, f"bad endpoint {text!r} (expected <piece>:<slot>)")
    try:
        return pid, int(slot)
    except ValueError:
        raise ParseError(lineno, f"bad slot in {text!r}") from None


def parse(text: str) -> GraphStructure:
    pieces, edges, rays = {}, {}, {}
    ids = set()
    refs = []  # (lineno, owner, endpoint)
    lines = text.splitlines()
    i = 0

    def claim_id(ident, lineno):
        if ident in ids:
            raise ParseError(lineno, f"duplicate id {ident!r}")
        ids.add(ident)

    while i < len(lines):
        lineno, raw = i + 1, lines[i]
        i += 1
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if raw[:1].isspace() and raw.strip()[:1] != "#":
            raise ParseError(lineno, "indented line outside a ray period")
        tokens = line.split()
        kind, rest = tokens[0], tokens[1:]
        if kind in ("piece", "solidtorus", "k2xi", "edge", "ray") and not rest:
            raise ParseError(lineno, f"{kind} record needs an id")
        if kind == "piece":
            claim_id(rest[0], lineno)
            base, _ = _base(rest[1:], lineno)
            pieces[rest[0]] = FiberedPiece(base)
        elif kind == "solidtorus":
            claim_id(rest[0], lineno)
            opts = _options(rest[1:], lineno, {"meridian"})
            if "meridian" not in opts:
                raise ParseError(lineno, "solidtorus needs meridian=<ms>,<mf>")
            try:
                pieces[rest[0]] = SolidTorusPiece(
                    tuple(_ints(opts["meridian"], 2, lineno, "meridian")))
            except PieceError as exc:
                raise ParseError(lineno, str(exc)) from None
        elif kind == "k2xi":
            claim_id(rest[0], lineno)
            opts = _options(rest[1:], lineno, {"fibration"})
            try:
                pieces[rest[0]] = K2IPiece(opts.get("fibration"))
            except PieceError as exc:
                raise ParseError(lineno, str(exc)) from None
        elif kind == "edge":
            if len(rest) < 3:
                raise ParseError(lineno, "edge needs <id> <pidA>:<slot> <pidB>:<slot>")
            claim_id(rest[0], lineno)
            a, b = _endpoint(rest[1], lineno), _endpoint(rest[2], lineno)
            opts = _options(rest[3:], lineno, {"matrix"}, flags=("reversing",))
            if "matrix" not in opts:
                raise ParseError(lineno, "edge needs matrix=<a>,<b>,<c>,<d>")
            edges[rest[0]] = TorusEdge(rest[0], a, b, _matrix(opts["matrix"], lineno),
                                       bool(opts.get("reversing")))
            refs += [(lineno, f"edge {rest[0]}", a), (lineno, f"edge {rest[0]}", b)]
        elif kind == "ray":
            claim_id(rest[0], lineno)
            opts = _options(rest[1:], lineno, {"attach", "period", "entry"})
            if "attach" not in opts or "period" not in opts:
                raise ParseError(lineno, "ray needs attach=<pid>:<slot> and period=<k>")
            attach = _endpoint(opts["attach"], lineno)
            k = _ints(opts["period"], 1, lineno, "period")[0]
            if k < 1:
                raise ParseError(lineno, "ray period must be at least 1")
            period = []
            for _ in range(k):
                if i >= len(lines) or not lines[i][:1].isspace() or not lines[i].strip():
                    raise ParseError(i + 1, f"ray {rest[0]} expects {k} indented period lines")
                sub = lines[i].split("#", 1)[0].split()
                i += 1
                if not sub or sub[0] != "piece":
                    raise ParseError(i, "period line must start with 'piece'")
                base, popts = _base(sub[1:], i, extra=("matrix",))
                if "matrix" not in popts:
                    raise ParseError(i, "period line needs matrix=<a>,<b>,<c>,<d>")
                period.append((FiberedPiece(base), _matrix(popts["matrix"], i)))
            entry = _matrix(opts["entry"], lineno) if "entry" in opts else None
            rays[rest[0]] = PeriodicRay(rest[0], attach, tuple(period), entry)
            refs.append((lineno, f"ray {rest[0]}", attach))
        else:
            raise ParseError(lineno, f"unknown record type {kind!r}")

    used = {}
    for lineno, owner, (pid, slot) in refs:
        if pid not in pieces:
            raise ParseError(lineno, f"{owner}: unknown piece {pid!r}")
        if slot not in pieces[pid].slots:
            raise ParseError(lineno, f"{owner}: dangling slot {pid}:{slot} "
                                     f"(piece has {len(pieces[pid].slots)} slots)")
        if (pid, slot) in used:
            raise ParseError(lineno, f"{owner}: slot {pid}:{slot} already used by "
                                     f"{used[(pid, slot)]}")
        used[(pid, slot)] = owner
    return GraphStructure(pieces, edges, rays)


def _base_fields(base: BaseOrbifold) -> str:
    return base.describe()


def serialize(g: GraphStructure) -> str:
    pos = {}
    out = []
    for pid, piece in g.pieces.items():
        pos.update({(pid, s): i for i, s in enumerate(piece.slots)})
        if isinstance(piece, FiberedPiece):
            out.append(f"piece {pid} {_base_fields(piece.base)}")
        elif isinstance(piece, SolidTorusPiece):
            out.append(f"solidtorus {pid} meridian={piece.meridian[0]},{piece.meridian[1]}")
        else:
            fib = f" fibration={piece.fibration}" if piece.fibration else ""
            out.append(f"k2xi {pid}{fib}")

    def ep(endpoint):
        return f"{endpoint[0]}:{pos[endpoint]}"

    for e in g.edges.values():
        flag = " reversing" if e.base_reversing else ""
        out.append(f"edge {e.id} {ep(e.a)} {ep(e.b)} matrix={e.matrix}{flag}")
    for r in g.rays.values():
        entry = f" entry={r.entry}" if r.entry is not None else ""
        out.append(f"ray {r.id} attach={ep(r.attach)} period={len(r.period)}{entry}")
        for piece, m in r.period:
            out.append(f"  piece {_base_fields(piece.base)} matrix={m}")
    return "\n".join(out) + "\n"


def load(path) -> GraphStructure:
    with open(path) as fh:
        return parse(fh.read())
