"""lp_solve LP-format export and re-import for the deletion program."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .problem import GenerationProblem
from .solver import _BAND_GUARD, IntegerProgram

DEV = "dev"


@dataclass
class LPModel:
    sense: str                                          # "min" or "max"
    objective: dict[str, float]
    rows: list[tuple[str, dict[str, float], str, float]]  # (label, coefs, op, rhs)
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)
    ints: list[str] = field(default_factory=list)

    def variables(self) -> list[str]:
        seen: dict[str, None] = {}
        for v in self.objective:
            seen.setdefault(v)
        for _, coefs, _, _ in self.rows:
            for v in coefs:
                seen.setdefault(v)
        for v in self.bounds:
            seen.setdefault(v)
        return list(seen)


def var_name(key: tuple[int, int]) -> str:
    return f"x_{key[0]}_{key[1]}"


def to_lp_model(problem: GenerationProblem) -> LPModel:
    names = [var_name(k) for k in problem.keys]
    a = {n: float(c) for n, c in zip(names, problem.coef)}
    m = {n: float(c) for n, c in zip(names, problem.multiplicity)}
    band_lo = float(problem.ch_low - problem.ch_constant)
    band_hi = float(problem.ch_high - problem.ch_constant)
    rest = float(problem.target_size - problem.size_constant)
    rows = [
        ("ch_lo", a, ">=", band_lo),
        ("ch_hi", dict(a), "<=", band_hi),
        ("size_lo", {**m, DEV: 1.0}, ">=", rest),
        ("size_hi", {**m, DEV: -1.0}, "<=", rest),
    ]
    bounds = {n: (float(lo), float(hi)) for n, lo, hi in zip(names, problem.lower, problem.upper)}
    return LPModel("min", {DEV: 1.0}, rows, bounds, names)


def _num(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def _expr(coefs: dict[str, float]) -> str:
    parts = []
    for name, c in coefs.items():
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign}{_num(abs(c))} {name}")
    return " ".join(parts) if parts else "0"


def write_lp(model: LPModel, comment: str = "") -> str:
    out = []
    if comment:
        for line in comment.splitlines():
            out.append(f"/* {line} */")
    out.append("")
    out.append(f"{model.sense}: {_expr(model.objective)};")
    out.append("")
    for label, coefs, op, rhs in model.rows:
        out.append(f"{label}: {_expr(coefs)} {op} {_num(rhs)};")
    out.append("")
    for name, (lo, hi) in model.bounds.items():
        if lo != 0:
            out.append(f"{name} >= {_num(lo)};")
        out.append(f"{name} <= {_num(hi)};")
    if model.ints:
        out.append("")
        out.append("int " + ",".join(model.ints) + ";")
    return "\n".join(out) + "\n"


def export_lp(problem: GenerationProblem) -> str:
    header = (
        "structuredness-controlled deletion program\n"
        f"target_ch = {float(problem.target_ch)!r} +/- {float(problem.epsilon)!r}\n"
        f"target_size = {problem.target_size}  seed_size = {problem.seed_size}\n"
        f"variables = {len(problem.keys)}"
    )
    return write_lp(to_lp_model(problem), header)


_TERM = re.compile(r"([+-]?)\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)?\s*\*?\s*([A-Za-z_][A-Za-z0-9_\[\].]*)")
_OPS = (">=", "<=", "=<", "=>", "=", "<", ">")


def _parse_expr(text: str) -> dict[str, float]:
    text = text.strip()
    coefs: dict[str, float] = {}
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse LP expression near {text[pos:pos + 20]!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        c = float(m.group(2)) if m.group(2) else 1.0
        coefs[m.group(3)] = coefs.get(m.group(3), 0.0) + sign * c
        pos = m.end()
    return coefs


def _split_op(stmt: str):
    for op in _OPS:
        idx = stmt.find(op)
        if idx >= 0:
            norm = {"=<": "<=", "=>": ">=", "<": "<=", ">": ">="}.get(op, op)
            return stmt[:idx], norm, stmt[idx + len(op):]
    raise ValueError(f"no relational operator in {stmt!r}")


def parse_lp(text: str) -> LPModel:
    text = re.sub(r"/\*.*?\*/", " ", text, flags=re.S)
    text = re.sub(r"//[^\n]*", " ", text)
    model = LPModel("min", {}, [])
    for raw in text.split(";"):
        stmt = " ".join(raw.split())
        if not stmt:
            continue
        low = stmt.lower()
        if low.startswith(("max:", "min:", "maximise:", "minimise:", "maximize:", "minimize:")):
            head, body = stmt.split(":", 1)
            model.sense = "max" if head.lower().startswith("max") else "min"
            model.objective = _parse_expr(body)
            continue
        if low.startswith("int "):
            model.ints.extend(v.strip() for v in re.split(r"[,\s]+", stmt[4:]) if v.strip())
            continue
        label = None
        m = re.match(r"([A-Za-z_][A-Za-z0-9_]*)\s*:(?!=)", stmt)
        if m:
            label = m.group(1)
            stmt = stmt[m.end():]
        lhs, op, rhs = _split_op(stmt)
        coefs = _parse_expr(lhs)
        value = float(rhs)
        if label is None and len(coefs) == 1:
            (name, c), = coefs.items()
            lo, hi = model.bounds.get(name, (0.0, float("inf")))
            bound = value / c
            if c < 0:
                op = {"<=": ">=", ">=": "<="}.get(op, op)
            if op == ">=":
                lo = bound
            elif op == "<=":
                hi = bound
            else:
                lo = hi = bound
            model.bounds[name] = (lo, hi)
            continue
        model.rows.append((label or f"R{len(model.rows) + 1}", coefs, op, value))
    return model


def import_lp(text: str) -> IntegerProgram:
    """Rebuild the solver's view of a program exported by :func:`export_lp`."""
    model = parse_lp(text)
    rows = {label: (coefs, op, rhs) for label, coefs, op, rhs in model.rows}
    names = [n for n in model.ints]
    a_row, _, band_lo = rows["ch_lo"]
    _, _, band_hi = rows["ch_hi"]
    m_row, _, target = rows["size_lo"]
    lo = [int(model.bounds.get(n, (0.0, 0.0))[0]) for n in names]
    hi = [int(model.bounds[n][1]) for n in names]
    return IntegerProgram(
        a=[a_row.get(n, 0.0) for n in names],
        m=[m_row.get(n, 0.0) for n in names],
        lo=lo,
        hi=hi,
        band_lo=band_lo + _BAND_GUARD,
        band_hi=band_hi - _BAND_GUARD,
        target=target,
    )
