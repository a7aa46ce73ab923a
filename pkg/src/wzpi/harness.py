"""Run every check the catalog asks for and collect the outcome in a report.

Each entry contributes one or more records (id, check, status).  Checks that
build on other entries (product assemblies, the constant of a pair whose
certificate failed) are SKIPPED when an input already FAILed, so a single bad
field shows up as a single FAIL.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

from .catalog import Catalog
from .identity import (AssemblyMismatch, ConstantIndeterminate, Identity, certify_identity,
                       check_constant, check_series, product_assembly_check)
from .numerics.constexpr import DomainError
from .numerics.constexpr import PrecisionUnreachable as ConstPrecision
from .numerics.formal import (ConvergenceViolation, ParameterPole, clausen_check,
                              clausen_derivative_check, clausen_samples, euler_check)
from .numerics.series import PrecisionUnreachable as SeriesPrecision
from .hyperterm import PoleEncountered
from .wz import (BoundaryNonvanishing, CertificateFails, ConstantMismatch, NoTelescoperUpToOrder,
                 NotGosperSummable)

MODES = ("symbolic", "numeric", "full")
PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"
CLAUSEN_SAMPLES = 20

# Failures a check can legitimately report; anything else is a bug and propagates.
_FAILURES = (
    CertificateFails, BoundaryNonvanishing, ConstantMismatch, NotGosperSummable, NoTelescoperUpToOrder,
    AssemblyMismatch, PoleEncountered, DomainError, ConstPrecision, SeriesPrecision, ParameterPole,
    ConvergenceViolation, ZeroDivisionError,
)


@dataclass(frozen=True)
class Record:
    id: str
    check: str
    status: str
    residual_exp: int | None = None
    terms: int | None = None
    ms: float = 0.0
    reason: str = ""

    def as_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        if timing:
            d["ms"] = round(self.ms, 1)
        else:
            del d["ms"]
        return d


@dataclass
class Report:
    mode: str
    digits: int
    records: list = field(default_factory=list)

    def sorted(self) -> list:
        return sorted(self.records, key=lambda r: (r.id, r.check))

    def count(self, status: str) -> int:
        return sum(r.status == status for r in self.records)

    @property
    def failures(self) -> list:
        return [r for r in self.sorted() if r.status == FAIL]

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0

    def status_of(self, ident: str, check: str | None = None) -> str | None:
        found = [r.status for r in self.records if r.id == ident and (check is None or r.check == check)]
        if not found:
            return None
        if FAIL in found:
            return FAIL
        return PASS if all(s == PASS for s in found) else SKIPPED

    def render_text(self) -> str:
        lines = []
        for r in self.sorted():
            res = "-" if r.residual_exp is None else f"10^{r.residual_exp}"
            terms = "-" if r.terms is None else str(r.terms)
            line = f"{r.status:<8}{r.id:<22}{r.check:<20}residual {res:<8} terms {terms:<6}{r.ms:9.1f} ms"
            if r.reason:
                line += f"  ({r.reason})"
            lines.append(line)
        lines.append(f"{self.count(PASS)} passed, {self.count(FAIL)} failed, {self.count(SKIPPED)} skipped "
                     f"(mode {self.mode}, {self.digits} digits)")
        return "\n".join(lines)

    def render_structured(self, timing: bool = True) -> str:
        """One JSON object per line, sorted by (id, check)."""
        return "\n".join(json.dumps(r.as_dict(timing), sort_keys=True) for r in self.sorted())


def _fail(ident: str, check: str, err: Exception, start: float) -> Record:
    return Record(ident, check, FAIL, None, None, _ms(start), f"{type(err).__name__}: {err}")


def _ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000


def certificate_record(e: Identity, digits: int) -> Record:
    start = time.perf_counter()
    try:
        proof = certify_identity(e, digits, constant=False)
    except _FAILURES as err:
        return _fail(e.id, "certificate", err, start)
    reason = "" if proof.boundary.tail_checked else proof.boundary.note
    return Record(e.id, "certificate", PASS, None, None, _ms(start), reason)


def constant_record(e: Identity, digits: int) -> Record:
    start = time.perf_counter()
    try:
        c = check_constant(e, digits)
    except ConstantIndeterminate as err:
        return Record(e.id, "constant", SKIPPED, None, None, _ms(start), str(err))
    except _FAILURES as err:
        return _fail(e.id, "constant", err, start)
    status = PASS if c.status == "PASS" else SKIPPED
    reason = "" if status == PASS else f"{c.status.lower()}: {c.reason}"
    return Record(e.id, "constant", status, c.residual_exp, c.terms, _ms(start), reason)


def series_record(e: Identity, digits: int) -> Record:
    start = time.perf_counter()
    try:
        r = check_series(e, digits)
    except _FAILURES as err:
        return _fail(e.id, "series", err, start)
    reason = r.reason or r.method
    return Record(e.id, "series", r.status, r.residual_exp, r.terms or None, _ms(start), reason)


def assembly_record(e: Identity, cat: Catalog, digits: int) -> Record:
    start = time.perf_counter()
    first, second = (cat[m] for m in e.members)
    try:
        r = product_assembly_check(first, second, cat[e.target], digits, e.factor or "1")
    except _FAILURES as err:
        return _fail(e.id, "assembly", err, start)
    return Record(e.id, "assembly", PASS, r.residual_exp, r.terms, _ms(start))


def clausen_records(e: Identity) -> list[Record]:
    which, order = e.params["which"], e.params["order"]
    out = []
    for check, fn in (("clausen", clausen_check), ("clausen-derivative", clausen_derivative_check)):
        start = time.perf_counter()
        bad = None
        try:
            for a, b in clausen_samples(which, CLAUSEN_SAMPLES, order):
                res = fn(which, a, b, order)
                if not res:
                    bad = f"a={a}, b={b}: first difference at z^{res.first_failure}"
                    break
        except _FAILURES as err:
            out.append(_fail(e.id, check, err, start))
            continue
        status = FAIL if bad else PASS
        out.append(Record(e.id, check, status, None, CLAUSEN_SAMPLES, _ms(start), bad or f"order {order}"))
    return out


def euler_record(e: Identity, digits: int) -> Record:
    start = time.perf_counter()
    p = e.params
    try:
        res = euler_check(p["a"], p["b"], p["c"], p["z"], digits)
    except _FAILURES as err:
        return _fail(e.id, "euler", err, start)
    exp = res.detail.rsplit(" ", 1)[-1]
    residual = None if exp == "None" else int(exp)
    return Record(e.id, "euler", PASS if res else FAIL, residual, None, _ms(start),
                  "" if res else res.detail)


def verify_all(catalog: Catalog, digits: int = 50, mode: str = "full") -> Report:
    """Check every entry.  ``symbolic`` runs the exact checks (certificates,
    formal series), ``numeric`` the floating-point ones, ``full`` both."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {', '.join(MODES)}")
    symbolic = mode in ("symbolic", "full")
    numeric = mode in ("numeric", "full")
    report = Report(mode, digits)
    add = report.records.append

    for e in (catalog[i] for i in catalog.ids()):
        if e.kind == "pair":
            cert = certificate_record(e, digits) if symbolic else None
            if cert is not None:
                add(cert)
            if numeric:
                if cert is not None and cert.status == FAIL:
                    add(Record(e.id, "constant", SKIPPED, reason="certificate failed"))
                else:
                    add(constant_record(e, digits))
        elif e.kind == "series" and numeric:
            add(series_record(e, digits))
        elif e.kind == "clausen" and symbolic:
            report.records.extend(clausen_records(e))
        elif e.kind == "euler" and numeric:
            add(euler_record(e, digits))
    failed = {r.id for r in report.records if r.status == FAIL}

    if numeric:
        for e in catalog.of_kind("product"):
            blocked = sorted((set(e.members) | {e.target}) & failed)
            if blocked:
                add(Record(e.id, "assembly", SKIPPED, reason=f"depends on failing {', '.join(blocked)}"))
            else:
                add(assembly_record(e, catalog, digits))
    return report


__all__ = [
    "verify_all", "Report", "Record", "MODES", "PASS", "FAIL", "SKIPPED", "certificate_record",
    "constant_record", "series_record", "assembly_record", "clausen_records", "euler_record",
]
