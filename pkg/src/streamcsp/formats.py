"""Text file formats: instance streams, distributions, polarization traces and
generator metadata.  Indices are 1-based in files and 0-based in memory."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable, TextIO

from .core import CSPError, decode, encode
from .dist import Dist
from .events import Stream, StreamEvent
from .polarize import NonnegFn, PolarizationTrace, Step

STREAM_MAGIC = "CSPSTREAM v1"
DIST_MAGIC = "DIST v1"


class FormatError(CSPError):
    pass


def parse_rational(text: str) -> Fraction:
    """Exact value of ``p/q``, an integer or a decimal literal."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"not a rational number: {text!r}") from None


def fmt_rational(x: Fraction) -> str:
    return str(Fraction(x))


def _lines(text: str) -> list[tuple[int, str]]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((no, line))
    return out


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise FormatError(f"cannot read {path}: {e.strerror}") from None


def _header_fields(line: str, no: int, names: Iterable[str]) -> dict[str, int]:
    got = {}
    for tok in line.split():
        key, sep, val = tok.partition("=")
        if not sep:
            raise FormatError(f"line {no}: expected key=value, got {tok!r}")
        try:
            got[key] = int(val)
        except ValueError:
            raise FormatError(f"line {no}: {key} must be an integer") from None
    missing = set(names) - set(got)
    if missing:
        raise FormatError(f"line {no}: missing {', '.join(sorted(missing))}")
    return got


def _sign(tok: str, no: int) -> int:
    if tok in ("+1", "1"):
        return 1
    if tok in ("-1", "−1"):
        return -1
    raise FormatError(f"line {no}: sign must be +1 or -1, got {tok!r}")


def parse_stream(text: str) -> Stream:
    lines = _lines(text)
    if not lines or lines[0][1] != STREAM_MAGIC:
        raise FormatError(f"missing '{STREAM_MAGIC}' header")
    if len(lines) < 2:
        raise FormatError("missing 'n=<n> k=<k>' line")
    hdr = _header_fields(lines[1][1], lines[1][0], ("n", "k"))
    n, k = hdr["n"], hdr["k"]
    if n < 1 or k < 1:
        raise FormatError("n and k must be positive")
    stream = Stream(n, k)
    for no, line in lines[2:]:
        toks = line.split()
        if toks[0] not in ("+", "-", "−") or len(toks) != 1 + 2 * k:
            raise FormatError(f"line {no}: expected '+|- j_1..j_{k} s_1..s_{k}'")
        op = 1 if toks[0] == "+" else -1
        try:
            idx = tuple(int(t) - 1 for t in toks[1:1 + k])
        except ValueError:
            raise FormatError(f"line {no}: indices must be integers") from None
        signs = tuple(_sign(t, no) for t in toks[1 + k:])
        if any(not 0 <= j < n for j in idx):
            raise FormatError(f"line {no}: index out of range 1..{n}")
        try:
            stream.events.append(StreamEvent(op, idx, signs))
        except CSPError as e:
            raise FormatError(f"line {no}: {e}") from None
    return stream


def format_stream(stream: Stream) -> str:
    out = [STREAM_MAGIC, f"n={stream.n} k={stream.k}"]
    for e in stream:
        out.append(" ".join(["+" if e.op > 0 else "-", *(str(j + 1) for j in e.indices),
                             *("+1" if s > 0 else "-1" for s in e.signs)]))
    return "\n".join(out) + "\n"


def read_stream(path) -> Stream:
    return parse_stream(_read(path))


def write_stream(stream: Stream, path) -> None:
    Path(path).write_text(format_stream(stream))


def _bitstring(t: int, k: int) -> str:
    return format(t, f"0{k}b")


def parse_dist(text: str, normalized: bool = True):
    """A :class:`Dist`, or a :class:`NonnegFn` when ``normalized`` is false."""
    lines = _lines(text)
    if not lines or lines[0][1] != DIST_MAGIC:
        raise FormatError(f"missing '{DIST_MAGIC}' header")
    if len(lines) < 2:
        raise FormatError("missing 'k=<k>' line")
    k = _header_fields(lines[1][1], lines[1][0], ("k",))["k"]
    if not 1 <= k <= 16:
        raise FormatError("k out of range")
    vals: dict[int, Fraction] = {}
    for no, line in lines[2:]:
        toks = line.split()
        if len(toks) != 2 or len(toks[0]) != k or set(toks[0]) - {"0", "1"}:
            raise FormatError(f"line {no}: expected '<{k}-bit string> <p/q>'")
        t = int(toks[0], 2)
        if t in vals:
            raise FormatError(f"line {no}: repeated point {toks[0]}")
        vals[t] = parse_rational(toks[1])
    if len(vals) != 1 << k:
        raise FormatError(f"expected {1 << k} points, got {len(vals)}")
    p = tuple(vals[t] for t in range(1 << k))
    try:
        return Dist(k, p) if normalized else NonnegFn(k, p)
    except CSPError as e:
        raise FormatError(str(e)) from None


def format_dist(D) -> str:
    out = [DIST_MAGIC, f"k={D.k}"]
    out += [f"{_bitstring(t, D.k)} {fmt_rational(x)}" for t, x in enumerate(D.p)]
    return "\n".join(out) + "\n"


def read_dist(path, normalized: bool = True):
    return parse_dist(_read(path), normalized)


def write_dist(D, path) -> None:
    Path(path).write_text(format_dist(D))


def parse_inline_dist(spec: str, k: int) -> Dist:
    """``"11=1/2,00=1/2"`` style; unlisted points get zero mass."""
    p = [Fraction(0)] * (1 << k)
    for part in spec.split(","):
        key, sep, val = part.partition("=")
        key = key.strip()
        if not sep or len(key) != k or set(key) - {"0", "1"}:
            raise FormatError(f"bad distribution entry {part!r}")
        p[int(key, 2)] += parse_rational(val)
    try:
        return Dist(k, tuple(p))
    except CSPError as e:
        raise FormatError(str(e)) from None


# --- traces

def _pt(a) -> str:
    return _bitstring(encode(a), len(a))


def trace_lines(trace: PolarizationTrace) -> list[str]:
    out = [json.dumps({"u": _pt(s.u), "v": _pt(s.v), "eps": fmt_rational(s.eps),
                       "phi_before": fmt_rational(s.phi_before),
                       "phi_after": fmt_rational(s.phi_after)}) for s in trace.steps]
    if trace.final is not None:
        out.append(json.dumps({"final": {_bitstring(t, trace.final.k): fmt_rational(x)
                                         for t, x in enumerate(trace.final.values)}}))
    return out


def write_trace(trace: PolarizationTrace, out: TextIO) -> None:
    for line in trace_lines(trace):
        out.write(line + "\n")


def parse_trace(text: str) -> PolarizationTrace:
    trace = PolarizationTrace()
    for no, line in _lines(text):
        try:
            rec = json.loads(line)
        except json.JSONDecodeError:
            raise FormatError(f"line {no}: not JSON") from None
        if "final" in rec:
            fin = rec["final"]
            k = len(next(iter(fin)))
            trace.final = NonnegFn(k, tuple(parse_rational(fin[_bitstring(t, k)])
                                            for t in range(1 << k)))
        else:
            k = len(rec["u"])
            trace.steps.append(Step(decode(int(rec["u"], 2), k), decode(int(rec["v"], 2), k),
                                    parse_rational(rec["eps"]), parse_rational(rec["phi_before"]),
                                    parse_rational(rec["phi_after"])))
    return trace


# --- generator metadata sidecar

def meta_lines(gen, params, include_planted: bool = True) -> list[str]:
    head = {"kind": "meta", "seed": params.seed, "n": params.n, "k": params.k,
            "alpha_m": fmt_rational(params.alpha_m), "T": params.T,
            "tau": fmt_rational(params.tau), "events": len(gen.stream)}
    if include_planted:
        head["x_star"] = [int(x) for x in gen.x_star]
    out = [json.dumps(head)]
    if include_planted:
        out += [json.dumps({"kind": "mask", "event": i + 1, "block": blk,
                            "mask": list(mask)}) for i, (blk, mask) in enumerate(gen.masks)]
    return out


def parse_meta(text: str) -> tuple[dict, list[dict]]:
    recs = [json.loads(line) for _, line in _lines(text)]
    if not recs or recs[0].get("kind") != "meta":
        raise FormatError("metadata must start with a meta record")
    return recs[0], recs[1:]
