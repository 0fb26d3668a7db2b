"""JSON reports for surface analyses and constructions."""

from __future__ import annotations

import json
import time
from fractions import Fraction
from importlib import resources
from typing import Any, Optional

import jsonschema

from .arith import Place
from .brauer import BrauerClassRep, ProvedConstant, ProvedWorking
from .construct import ConstructionCertificate
from .localglobal.verdicts import (
    AdelicUnknown,
    HasAdelicPoint,
    NoAt,
    Undetermined,
    WorkingSetOptions,
    WorkingSetReport,
    group_summary,
    working_set,
)
from .pencil import char_form, discriminants, is_cone, is_nonsingular_dp4, scheme_points
from .surface import Surface, format_linear

SCHEMA_VERSION = "1.0"


def load_schema() -> dict:
    return json.loads(resources.files("dp4brauer").joinpath("report.schema.json").read_text())


def validate(report: dict) -> None:
    """Raise jsonschema.ValidationError when the report does not match the bundled schema."""
    jsonschema.validate(report, load_schema())


def _point(s) -> str:
    mu, nu = s
    return "inf" if nu == 0 else str(Fraction(mu) / Fraction(nu))


def pencil_section(surface: Surface) -> dict:
    p = surface.pencil
    cone = is_cone(p)
    out: dict[str, Any] = {"cone": cone, "nonsingular": False, "split": False, "scheme_points": []}
    if cone:
        return out
    sx = scheme_points(char_form(p))
    out["nonsingular"] = is_nonsingular_dp4(p)
    out["split"] = sx.split
    discs = {}
    if out["nonsingular"]:
        discs = {_point(s): c.value for s, c in discriminants(p)}
    for s, m in sx.rational_points:
        out["scheme_points"].append(
            {"degree": 1, "point": _point(s), "multiplicity": m, "discriminant": discs.get(_point(s))}
        )
    for coeffs, cls, m in sx.quadratic_factors:
        out["scheme_points"].append(
            {
                "degree": 2,
                "point": " ".join(str(c) for c in coeffs),
                "multiplicity": m,
                "splitting_class": cls.value,
            }
        )
    for coeffs, m in sx.residual:
        out["scheme_points"].append(
            {"degree": len(coeffs) - 1, "point": " ".join(str(c) for c in coeffs), "multiplicity": m}
        )
    return out


def _verdict(place: Place, v) -> dict:
    if isinstance(v, ProvedConstant):
        return {"place": str(place), "status": "constant", "certificate": v.reason, "detail": v.detail, "evidence": []}
    if isinstance(v, ProvedWorking):
        return {
            "place": str(place),
            "status": "working",
            "certificate": v.reason,
            "detail": v.detail,
            "evidence": [str(e) for e in v.evidence],
        }
    assert isinstance(v, Undetermined)
    return {
        "place": str(place),
        "status": "undetermined",
        "certificate": "none",
        "detail": v.detail,
        "evidence": sorted(str(x) for x in v.image),
    }


def _adelic(a) -> dict:
    if isinstance(a, HasAdelicPoint):
        return {"status": "has-adelic-point", "detail": a.evidence, "assumptions": list(a.assumptions)}
    if isinstance(a, NoAt):
        return {"status": "no-local-point", "place": str(a.place), "detail": a.detail, "assumptions": []}
    assert isinstance(a, AdelicUnknown)
    return {"status": "unknown", "detail": a.detail, "assumptions": []}


def _group(g) -> dict:
    return {
        "order": g.order,
        "structure": g.structure,
        "method": g.method,
        "generators": [list(x) for x in g.generators],
    }


def _class(c: BrauerClassRep) -> dict:
    pres = c.presentation
    return {
        "D": c.D,
        "rows": [[format_linear(l) for l in row] for row in pres.rows],
        "row_discriminants": [str(d) for d in pres.row_discs],
        "quotient": f"({format_linear(pres.rows[0][0])}) / ({format_linear(pres.rows[1][0])})",
    }


def places_section(ws: WorkingSetReport) -> dict:
    return {
        "verdicts": [_verdict(p, v) for p, v in sorted(ws.verdicts.items())],
        "other_places": ws.other_places,
        "working_set": [str(p) for p in ws.working_set],
        "complete": ws.complete,
        "adelic": _adelic(ws.adelic),
    }


def analyze(surface: Surface, options: Optional[WorkingSetOptions] = None, command: str = "analyze") -> dict:
    """Full pipeline: pencil invariants, Brauer group, per-place verdicts."""
    t0 = time.perf_counter()
    report: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "input": {"name": surface.name, "surface": surface.to_text()},
        "pencil": pencil_section(surface),
        "brauer": None,
        "places": None,
        "errors": [],
        "timings": {},
    }
    if not report["pencil"]["nonsingular"]:
        kind = "cone" if report["pencil"]["cone"] else "singular"
        report["errors"].append(f"{kind} pencil: not a nonsingular degree four del Pezzo surface")
    elif surface.presentation is None:
        g = group_summary(surface)
        report["brauer"] = {"group": _group(g), "class": None}
        report["errors"].append("no presentation of a Brauer class available")
    else:
        c = BrauerClassRep(surface.presentation)
        ws = working_set(surface, c, options)
        report["brauer"] = {"group": _group(ws.group), "class": _class(c)}
        report["places"] = places_section(ws)
    report["timings"]["total_s"] = round(time.perf_counter() - t0, 3)
    return report


def construct_report(cert: ConstructionCertificate, options: Optional[WorkingSetOptions] = None) -> dict:
    report = analyze(cert.surface, options, command="construct")
    report["construction"] = {
        "target": [str(p) for p in cert.target],
        "route": cert.route,
        "parameters": list(cert.params.as_tuple()) if cert.params else None,
        "search_log": list(cert.search_log),
        "claims": {str(p): k for p, k in sorted(cert.claims.items())},
        "notes": list(cert.notes),
    }
    return report


def render_text(report: dict) -> str:
    lines = [f"{report['command']}: {report['input']['name'] or 'surface'}"]
    pen = report["pencil"]
    lines.append(f"  nonsingular: {pen['nonsingular']}  split: {pen['split']}")
    for sp in pen["scheme_points"]:
        extra = sp.get("discriminant") if sp["degree"] == 1 else f"splitting class {sp.get('splitting_class')}"
        lines.append(f"  S_X point [{sp['point']}] degree {sp['degree']}: {extra}")
    if report["brauer"]:
        g = report["brauer"]["group"]
        lines.append(f"  Br(X)/Br(Q): {g['structure']} ({g['method']})")
    if report["places"]:
        pl = report["places"]
        for v in pl["verdicts"]:
            lines.append(f"  {v['place']:>8}: {v['status']:<12} {v['certificate']:<20} {v['detail']}")
            for e in v["evidence"]:
                lines.append(f"            {e}")
        lines.append(f"  other places: {pl['other_places']}")
        lines.append(f"  adelic points: {pl['adelic']['status']} ({pl['adelic']['detail']})")
        lines.append(f"  working set: {{{', '.join(pl['working_set'])}}}" + ("" if pl["complete"] else " (incomplete)"))
    if report.get("construction"):
        con = report["construction"]
        lines.append(f"  route: {con['route']}  parameters: {con['parameters']}")
        for entry in con["search_log"]:
            lines.append(f"    {entry}")
        for note in con["notes"]:
            lines.append(f"  note: {note}")
    for e in report["errors"]:
        lines.append(f"  error: {e}")
    return "\n".join(lines)
