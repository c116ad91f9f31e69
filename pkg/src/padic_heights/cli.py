"""Command-line front end.

A job is a JSON document; exact rationals are written as integers or
"num/den" strings.  Example::

    {"command": "height", "curve": [0, -5, 0, 1], "p": 13, "n": 5,
     "D1": {"antisymmetric": [[-1, 2]]}, "D2": {"antisymmetric": [[5, 10]]},
     "away": [["2", "3"]]}

Exit status: 0 success, 2 invalid job, 3 failed mathematical precondition,
4 precision exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .curve import AntisymDivisor, GeneralDivisor, MumfordDivisor, general_from_mumford
from .errors import HeightError, ValidationError
from .padic import BranchSpec, IWASAWA, Padic, format_padic, log

COMMANDS = ("height", "cup-matrix", "psi", "integrate-basis", "integrate-meromorphic",
            "frobenius-matrix")


def rational(value) -> Fraction:
    if isinstance(value, bool) or value is None:
        raise ValidationError(f"expected a rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            raise ValidationError(f"not a rational: {value!r}") from None
    raise ValidationError(f"rationals are integers or 'num/den' strings, got {value!r}")


class Job:
    """Validated job description."""

    def __init__(self, raw: dict):
        if not isinstance(raw, dict):
            raise ValidationError("a job is a JSON object")
        self.raw = raw
        self.command = raw.get("command", "height")
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}", allowed=list(COMMANDS))
        try:
            self.curve = [rational(c) for c in raw["curve"]]
            self.p = int(raw["p"])
        except KeyError as e:
            raise ValidationError(f"missing field {e.args[0]!r}") from None
        deg = len(self.curve) - 1
        if deg < 3 or deg % 2 == 0 or self.curve[-1] != 1:
            raise ValidationError("curve must be monic of odd degree >= 3")
        self.n = int(raw.get("n", 5))
        if not 1 <= self.n <= 40:
            raise ValidationError("precision n must lie in 1..40")
        self.W = raw.get("W", "unit-root")
        if not isinstance(self.W, (str, list)):
            raise ValidationError("W is a policy name or a list of g column vectors")
        branch = raw.get("branch", 0)
        self.branch_value = rational(branch)
        self.away = [(rational(c), rational(a)) for c, a in raw.get("away", [])]

    def branch(self, prec: int) -> BranchSpec:
        if self.branch_value == 0:
            return IWASAWA
        return BranchSpec(Padic.from_rational(self.p, self.branch_value, prec))


# ---------------------------------------------------------------------------
# parsing divisors


def _points(C, spec, what: str):
    out = []
    if not isinstance(spec, list) or not spec:
        raise ValidationError(f"{what}: expected a non-empty list of points")
    for item in spec:
        if not isinstance(item, list) or len(item) not in (2, 3):
            raise ValidationError(f"{what}: a point is [x, y] or [x, y, multiplicity]")
        x, y = rational(item[0]), rational(item[1])
        m = int(item[2]) if len(item) == 3 else 1
        out.append((C.point(x, y), m))
    return out


def _mumford(C, spec, what: str):
    try:
        a = [rational(c) for c in spec["a"]]
        b = [rational(c) for c in spec["b"]]
    except (KeyError, TypeError):
        raise ValidationError(f"{what}: Mumford data is {{'a': [...], 'b': [...]}}") from None
    from .polyseries import Poly

    prec = C.prec
    return MumfordDivisor(Poly.from_rationals(C.p, a, prec), Poly.from_rationals(C.p, b, prec))


def parse_divisor(C, spec, what: str):
    """AntisymDivisor or GeneralDivisor from a job entry."""
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValidationError(f"{what}: give exactly one of 'antisymmetric', 'general', "
                              "'mumford', 'mumford_pair'")
    (kind, body), = spec.items()
    if kind == "antisymmetric":
        return AntisymDivisor(_points(C, body, what))
    if kind == "general":
        return GeneralDivisor(_points(C, body, what))
    if kind == "mumford":
        D = _mumford(C, body, what)
        return AntisymDivisor([(P, 1) for P in D.points()])
    if kind == "mumford_pair":
        if not isinstance(body, list) or len(body) != 2:
            raise ValidationError(f"{what}: mumford_pair is [plus, minus]")
        return general_from_mumford(C, _mumford(C, body[0], what), _mumford(C, body[1], what))
    raise ValidationError(f"{what}: unknown divisor kind {kind!r}")


# ---------------------------------------------------------------------------
# running


class Report:
    def __init__(self):
        self.lines: list[tuple[str, str]] = []

    def add(self, label: str, value):
        self.lines.append((label, _render(value)))

    def text(self) -> str:
        return "".join(f"{label}: {value}\n" for label, value in self.lines)

    def structured(self) -> str:
        return json.dumps([{"label": label, "value": value} for label, value in self.lines],
                          indent=1) + "\n"


def _render(value) -> str:
    if isinstance(value, Padic):
        return format_padic(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_render(v) for v in value) + "]"
    return str(value)


def run(job: Job, verbosity: int = 0) -> Report:
    from .heights import (HeightContext, cup_matrix, height_antisym, height_general, psi,
                          psi_in_basis)

    report = Report()
    if job.command == "cup-matrix":
        N = cup_matrix(job.curve)
        for i, row in enumerate(N.exact):
            report.add(f"N[{i}]", [str(c) for c in row])
        return report

    ctx = HeightContext.build(job.curve, job.p, job.n, policy=job.W,
                              branch=job.branch(job.n + 10))
    ctx.branch = job.branch(ctx.n_work + 4)
    C = ctx.C
    if verbosity >= 1:
        report.add("working precision", ctx.n_work)
        report.add("v_p(det(M - I))", ctx.defect)
    if verbosity >= 2 or job.command == "frobenius-matrix":
        for i, row in enumerate(ctx.fd.frob):
            report.add(f"Frob[{i}]", [x.add_bigoh(ctx.n) for x in row])

    if job.command == "frobenius-matrix":
        return report

    if job.command == "height":
        D1 = parse_divisor(C, job.raw.get("D1"), "D1")
        D2 = parse_divisor(C, job.raw.get("D2"), "D2")
        if type(D1) is not type(D2):
            raise ValidationError("D1 and D2 must both be antisymmetric or both general")
        if isinstance(D1, AntisymDivisor):
            h = height_antisym(D1, D2, ctx)
        else:
            h = height_general(D1, D2, ctx)
        if verbosity >= 1:
            if verbosity >= 2:
                N = ctx.N
                for i, row in enumerate(N.exact):
                    report.add(f"N[{i}]", [str(c) for c in row])
            for label, value in ctx.trace:
                report.add(label, value)
        report.add("local height", h.value)
        report.add("precision", h.precision)
        if job.away:
            total = h.value
            for c, a in job.away:
                total = total + log(Padic.from_rational(job.p, a, ctx.n_work + 4), ctx.branch) * c
            report.add("global height", total.add_bigoh(h.precision))
        return report

    if job.command == "psi":
        D = parse_divisor(C, job.raw.get("D"), "D")
        if not isinstance(D, AntisymDivisor):
            raise ValidationError("psi needs an antisymmetric divisor")
        from .curve import third_kind_form

        v = psi(third_kind_form(C, D), D, ctx)
        report.add("psi", v)
        if job.raw.get("frobenius_basis"):
            report.add("psi in frobenius basis", psi_in_basis(v, ctx))
        return report

    if job.command == "integrate-basis":
        from .coleman import basis_integrals

        (P, _), (Q, _) = _points(C, [job.raw.get("P"), job.raw.get("Q")], "P/Q")
        for i, I in enumerate(basis_integrals(C, ctx.fd, P, Q, job.n + 2)):
            report.add(f"int x^{i} dx/2y", I.value.add_bigoh(min(I.precision, job.n)))
        return report

    if job.command == "integrate-meromorphic":
        from .coleman import integrate_meromorphic
        from .curve import third_kind_form

        D = parse_divisor(C, job.raw.get("D"), "D")
        E = parse_divisor(C, job.raw.get("E"), "E")
        if not isinstance(D, AntisymDivisor) or not isinstance(E, AntisymDivisor):
            raise ValidationError("integrate-meromorphic takes antisymmetric D and E")
        nu, beta = third_kind_form(C, D), third_kind_form(C, E)
        steps = []
        I = integrate_meromorphic(C, ctx.fd, nu, E, psi(nu, D, ctx), psi(beta, E, ctx),
                                  ctx.N.exact, ctx.n_work, beta=beta, trace=steps)
        if verbosity >= 1:
            for label, value in steps:
                report.add(label, value)
        report.add("integral", I.value.add_bigoh(min(I.precision, job.n)))
        return report
    raise ValidationError(f"unhandled command {job.command!r}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="padic-heights",
                                     description="Local p-adic heights and Coleman integrals")
    parser.add_argument("--job", required=True, help="JSON job file ('-' for stdin)")
    parser.add_argument("--verbosity", type=int, choices=(0, 1, 2), default=0)
    parser.add_argument("--emit", choices=("text", "structured"), default="text")
    args = parser.parse_args(argv)
    try:
        if args.job == "-":
            raw = json.load(sys.stdin)
        else:
            with open(args.job) as fh:
                raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        print(f"error VALIDATION: cannot read job: {e}", file=sys.stderr)
        return 2
    try:
        report = run(Job(raw), args.verbosity)
    except HeightError as e:
        print(f"error {e.code}: {e}", file=sys.stderr)
        return e.exit_status
    sys.stdout.write(report.text() if args.emit == "text" else report.structured())
    return 0


if __name__ == "__main__":
    sys.exit(main())
