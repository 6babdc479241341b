"""``derham``: run consistency checks and derivations from a JSON config.

Exit codes: 0 when every requested check passes, 1 when one fails, 2 when the
config or an argument cannot be parsed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import plane2d
from .diffcalc import (
    assemble,
    check_complex,
    derive_d2x_d2x_relations,
    derive_dx_d2x_relations,
    derive_F_relations,
    derive_x_d2x_relations,
)
from .freealg import Element, StructureError
from .parsing import ParseError
from .symring import ConfigurationError, Ring, q_integer
from .tensorcheck import (
    DimensionError,
    PreconditionError,
    StructureMatrix,
    build_from_hecke,
    check_bff,
    check_braid,
    check_braid_compat,
    check_F_consistency,
    check_hecke,
    check_linear_condition,
    is_cubic_root,
)

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


class ConfigError(ValueError):
    pass


@dataclass
class Verdict:
    name: str
    status: str
    witness: str | None = None


@dataclass
class Report:
    command: str
    checks: list = field(default_factory=list)
    sections: dict = field(default_factory=dict)
    timing: float = 0.0

    def check(self, name, ok, witness=None):
        self.checks.append(Verdict(name, PASS if ok else FAIL, None if ok else witness))
        return ok

    def skip(self, name, why):
        self.checks.append(Verdict(name, SKIPPED, why))

    def add(self, section, lines):
        self.sections.setdefault(section, []).extend(lines)

    @property
    def passed(self) -> bool:
        return all(v.status != FAIL for v in self.checks)

    def to_text(self) -> str:
        out = [f"derham {self.command}"]
        for title, lines in self.sections.items():
            out.append("")
            out.append(f"== {title}")
            out.extend(f"  {line}" for line in lines)
        if self.checks:
            out.append("")
            out.append("== checks")
            for v in self.checks:
                line = f"  [{v.status.upper()}] {v.name}"
                if v.witness:
                    line += f": {v.witness}"
                out.append(line)
        failed = sum(v.status == FAIL for v in self.checks)
        out.append("")
        out.append(f"result: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks, {failed} failed)")
        return "\n".join(out) + "\n"

    def to_structured(self) -> str:
        doc = {
            "command": self.command,
            "passed": self.passed,
            "checks": [{"name": v.name, "status": v.status, "witness": v.witness} for v in self.checks],
            "sections": self.sections,
            "timing_seconds": round(self.timing, 3),
        }
        return json.dumps(doc, indent=2) + "\n"


# -- config --------------------------------------------------------------


@dataclass
class AlgebraConfig:
    ring: Ring
    n: int
    Q: object
    B: StructureMatrix | None = None
    C: StructureMatrix | None = None
    F: StructureMatrix | None = None
    R: StructureMatrix | None = None
    mu: object = None
    lam: object = None
    coordinates: list | None = None
    branch: str | None = None


def load_config(source) -> AlgebraConfig:
    """Read an AlgebraConfig from a path, a JSON string's parsed dict, or a shipped name."""
    if isinstance(source, dict):
        doc = source
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    try:
        return _build_config(doc)
    except (ParseError, ConfigurationError, DimensionError, StructureError) as exc:
        raise ConfigError(str(exc)) from None
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed config: {exc!r}") from None


def _build_config(doc: dict) -> AlgebraConfig:
    names, invertible = [], []
    for item in doc["symbols"]:
        if isinstance(item, str):
            item = {"name": item}
        names.append(item["name"])
        if item.get("invertible", True):
            invertible.append(item["name"])
    ring = Ring(names, invertible)
    for constraint in doc.get("constraints", []):
        ring = ring.constrain(constraint)
    n = int(doc["n"])

    branch = None
    q_src = doc.get("Q", "Q")
    if q_src in plane2d.BRANCHES:
        branch = q_src
        ring, Q = plane2d.BRANCHES[q_src].realize(ring)
    else:
        Q = ring(str(q_src))

    def matrix(key):
        rows = doc.get(key)
        if rows is None:
            return None
        if len(rows) != n * n or any(len(r) != n * n for r in rows):
            raise DimensionError(f"matrix {key} must be {n * n}x{n * n}")
        return StructureMatrix.parse(ring, n, rows)

    mu = ring(str(doc["mu"])) if "mu" in doc else None
    lam = ring(str(doc["lambda"])) if "lambda" in doc else None
    return AlgebraConfig(ring, n, Q, matrix("B"), matrix("C"), matrix("F"), matrix("R"), mu, lam,
                         doc.get("coordinates"), branch)


def shipped_config(name: str) -> Path:
    """Path of a config shipped with the package, e.g. ``qplane_c1.json``."""
    return Path(str(resources.files("qderham") / "configs" / name))


def _require(cfg: AlgebraConfig, *keys):
    missing = [k for k in keys if getattr(cfg, k) is None]
    if missing:
        raise ConfigError(f"config lacks {', '.join(missing)}")


def _first_entry(M) -> str:
    i, j, c = M.nonzero_entries()[0]
    pair = lambda a: f"{a // M.n + 1}{a % M.n + 1}"
    return f"row {pair(i)}, column {pair(j)} is {c}"


# -- commands ------------------------------------------------------------


def cmd_check(cfg: AlgebraConfig, rep: Report, args):
    rep.add("setup", _setup_lines(cfg))
    if cfg.R is not None:
        rep.check("braid relation for R", check_braid(cfg.R))
        if cfg.mu is not None and cfg.lam is not None:
            rep.check(f"Hecke condition with mu = {cfg.mu}, lambda = {cfg.lam}", check_hecke(cfg.R, cfg.mu, cfg.lam))
    if cfg.B is not None and cfg.C is not None:
        from .tensorcheck import linear_condition_residual

        res = linear_condition_residual(cfg.B, cfg.C)
        rep.check("(E - B)(E + C) = 0", res.is_zero(), None if res.is_zero() else _first_entry(res))
        rep.check("B12 C23 C12 = C23 C12 B23 (modulo the B relations)", check_braid_compat(cfg.B, cfg.C))
    if cfg.F is not None:
        _require(cfg, "B", "C")
        rep.check("B12 F23 F12 = F23 F12 B23", check_bff(cfg.B, cfg.F))
        fc = check_F_consistency(cfg.C, cfg.F, cfg.Q)
        if is_cubic_root(cfg.Q):
            rep.check("(E + C)(E - Q F) = 0", fc.factored)
            rep.check("full and factored F-conditions agree when Q^2 + Q + 1 = 0", bool(fc.cubic_identity))
        else:
            rep.check("E - (Q^2 + Q) C + ((Q^2 + Q) E - Q^3 C) Q F = 0", fc.full)
    if not rep.checks:
        raise ConfigError("nothing to check: give B and C, or R")


def cmd_derive(cfg: AlgebraConfig, rep: Report, args):
    _require(cfg, "C")
    from .freealg import Alphabet

    alphabet = Alphabet.calculus(cfg.n, cfg.coordinates)
    rep.add("setup", _setup_lines(cfg))
    rep.add("x d2x relations", [f"{e} = 0" for e in derive_x_d2x_relations(cfg.C, cfg.Q, alphabet)])
    rep.add("dx d2x relations", [f"{e} = 0" for e in derive_dx_d2x_relations(cfg.C, cfg.Q, alphabet)])
    pre, reduced = derive_d2x_d2x_relations(cfg.C, cfg.Q, alphabet)
    if reduced is None:
        rep.add("d2x d2x relations", [f"[3]_Q = {q_integer(3, cfg.Q)}: every relation vanishes identically"])
    else:
        rep.add("d2x d2x relations", [f"{e} = 0" for e in reduced if e]
                + [f"(each multiplied by [3]_Q = {q_integer(3, cfg.Q)})"])
    if cfg.F is not None:
        rep.add("F relations", [f"{e} = 0" for e in derive_F_relations(cfg.F, cfg.Q, alphabet) if e])


def _assembled(cfg: AlgebraConfig):
    _require(cfg, "B", "C")
    return assemble(cfg.B, cfg.C, cfg.Q, F=cfg.F, coordinates=cfg.coordinates)


def cmd_confluence(cfg: AlgebraConfig, rep: Report, args):
    spec = _assembled(cfg)
    rs = spec.relations
    rep.add("setup", _setup_lines(cfg))
    rep.add("rewrite rules", rs.render())
    pairs = rs.critical_pairs()
    bad = [p for p in pairs if not p.resolved]
    rep.add("critical pairs", [f"{len(pairs)} overlaps, {len(bad)} unresolved"]
            + [f"{spec.alphabet.render(p.word)} leaves {p.left - p.right} = 0" for p in bad])
    witness = f"{spec.alphabet.render(bad[0].word)}" if bad else None
    rep.check("all critical pairs resolve", not bad, witness)


def cmd_complex(cfg: AlgebraConfig, rep: Report, args):
    spec = _assembled(cfg)
    rep.add("setup", _setup_lines(cfg))
    rep.add("rewrite rules", spec.relations.render())
    for c in check_complex(spec, max_len=args.max_len).checks:
        witness = None
        if not c.passed:
            witness = f"{c.witness} -> {c.residue}" if c.residue is not None else c.witness
        rep.check(c.name, c.passed, witness)


def cmd_normal_form(cfg: AlgebraConfig, rep: Report, args):
    if not args.expr:
        raise ConfigError("normal-form needs an element, e.g. \"y*x\"")
    spec = _assembled(cfg)
    e = parse_element(args.expr, spec.alphabet, cfg.ring)
    nf = spec.relations.normal_form(e)
    rep.add("normal form", [f"{e}  ->  {nf}"])
    if spec.relations.residuals:
        rep.add("reduced modulo residual relations", [str(spec.relations.reduce(e))])


def cmd_hecke_build(cfg: AlgebraConfig, rep: Report, args):
    _require(cfg, "R", "mu", "lam")
    try:
        triple = build_from_hecke(cfg.R, cfg.mu, cfg.lam, cfg.Q)
    except PreconditionError as exc:
        for failure in exc.failures:
            rep.check("precondition", False, failure)
        return
    rep.add("setup", _setup_lines(cfg))
    for name, M in (("B = R/mu", triple.B), ("C = R/lambda", triple.C), ("F = Q^2 R/mu", triple.F)):
        rep.add(name, [line for line in str(M).splitlines()])
    labels = {
        "linear": "(E - B)(E + C) = 0",
        "braid_compat": "B12 C23 C12 = C23 C12 B23",
        "bff": "B12 F23 F12 = F23 F12 B23",
        "F_factored": "(E + C)(E - Q F) = 0",
    }
    for key, ok in triple.checks.items():
        if key == "F_factored" and not is_cubic_root(cfg.Q):
            rep.skip(labels[key], "requires Q^2 + Q + 1 = 0")
        else:
            rep.check(labels[key], ok)


def cmd_case2d(cfg, rep: Report, args):
    coords = ["x", "y"]
    ring = plane2d.case_ring()
    R = plane2d.standard_rhat(ring)
    rep.add("R-matrix (basis 11, 12, 21, 22)", str(R).splitlines())
    rep.check("braid relation for R", check_braid(R))
    rep.check("(R - qE)(R + q^-1 E) = 0", check_hecke(R, ring("q"), ring("q^-1")))
    plane = plane2d.coordinate_plane(ring, coords)
    rep.add("coordinate plane", plane.render())
    cov = plane2d.check_covariance(plane, plane2d.CoactionSpec.glq2("standard_q", ring))
    rep.check("coordinate plane covariant under GL_q(2)", cov.passed, _residue_text(cov))
    raw_lines = [_raw_comparison("coordinate plane", plane, "standard_q", ring)]

    families = [args.family] if args.family else [1, 2]
    for family in families:
        title = f"family {family}"
        C = plane2d.c_matrix(family, ring, verify=False)
        B = plane2d.plane_matrix(ring)
        rep.add(f"{title}: C matrix", str(C).splitlines())
        rep.check(f"{title}: (E - B)(E + C) = 0", check_linear_condition(B, C))
        rep.check(f"{title}: braid compatibility with B", check_braid_compat(B, C))
        analysis = plane2d.solve_q_branches(C)
        rep.add(f"{title}: Q branches", [
            f"{b.label}: {b.constraint}" + (f" ({b.note})" if b.note else "") for b in analysis.branches
        ])
        rep.add(f"{title}: branch evidence", analysis.evidence())
        product = analysis.factors[0]
        for f in analysis.factors[1:]:
            product = product * f
        rep.check(f"{title}: factorization expands back", product == analysis.eliminated)
        kind = f"rq_family{family}"
        for b in analysis.branches:
            if args.branch and b.label != args.branch:
                continue
            key = f"{title}: second-order plane, {b.label}"
            try:
                d2 = plane2d.second_order_plane(C, b, coords)
            except plane2d.BranchRefused as exc:
                rep.add(key, [f"refused: {exc}"])
                continue
            lines = d2.render()
            if d2.assumptions:
                lines.append("assuming nonzero: " + ", ".join(str(a) for a in d2.assumptions))
            rep.add(key, lines)
            group = "standard_q" if b.label in (plane2d.INV_SQRT_R_PLUS, plane2d.INV_SQRT_R_MINUS) else kind
            if b.label == plane2d.INV_SQRT_R_MINUS:
                continue  # same relations as the plus branch
            cov = plane2d.check_covariance(d2, plane2d.CoactionSpec.glq2(group, d2.ring))
            rep.check(f"{title}: {b.label} plane covariant under {group} (corrected)", cov.passed, _residue_text(cov))
            raw_lines.append(_raw_comparison(f"{title}: {b.label} plane", d2, group, d2.ring))

    swap = plane2d.swap_duality_check(ring)
    rep.add("swap duality", [f"x <-> y with {s} carries C1 onto C2" for s in swap.substitutions]
            or ["no substitution tried carries C1 onto C2"])
    rep.check("swap duality", swap.holds)
    corrections = []
    for kind in ("standard_q", "rq_family1", "rq_family2"):
        corrections += [f"{kind}: {line}" for line in plane2d.glq2_corrections(kind)]
    rep.add("corrections applied to the raw quantum-group relations", corrections)
    rep.add("raw versus corrected relation sets", raw_lines)


def _residue_text(cov) -> str | None:
    if cov.passed:
        return None
    text, residue = cov.residues[0]
    return f"{text} -> {residue}"


def _raw_comparison(what, plane, kind, ring) -> str:
    raw = plane2d.check_covariance(plane, plane2d.CoactionSpec.glq2(kind, ring, corrected=False))
    if raw.passed:
        line = f"{kind} raw: covariant, same verdict as corrected"
    else:
        line = f"{kind} raw: not covariant"
    if not raw.confluent:
        line += f" (combined relations leave {len(raw.unresolved)} unresolved overlaps)"
    if raw.residues:
        text, residue = raw.residues[0]
        line += f"; residue of {text}: {residue}"
    return f"{what}: {line}"


def _setup_lines(cfg: AlgebraConfig):
    lines = [f"ring symbols: {', '.join(cfg.ring.symbols)}"]
    lines += [f"constraint: {c}" for c in cfg.ring.constraints]
    lines.append(f"Q = {cfg.Q}" + (f" (branch {cfg.branch})" if cfg.branch else ""))
    return lines


def parse_element(src: str, alphabet, ring) -> Element:
    """``"y*x"``, ``"(q - 1)*x*dy + 2*y"``: coefficient factors first, then generators."""
    total = Element(alphabet, ring)
    for sign, term in _split_terms(src):
        factors = _split_top(term, "*")
        if any(not f.strip() for f in factors):
            raise ConfigError(f"empty factor in {term.strip()!r}")
        k = len(factors)
        while k > 0 and factors[k - 1].strip() in alphabet.position:
            k -= 1
        word = tuple(alphabet.position[f.strip()] for f in factors[k:])
        coeff_src = "*".join(factors[:k]).strip()
        if coeff_src and any(f.strip() in alphabet.position for f in factors[:k]):
            raise ConfigError(f"coefficients must precede generators in {term.strip()!r}")
        coeff = ring(coeff_src) if coeff_src else ring.one
        total = total + Element.from_word(alphabet, ring, word, coeff if sign > 0 else -coeff)
    return total


def _split_top(src, sep):
    parts, depth, cur = [], 0, ""
    for ch in src:
        depth += (ch == "(") - (ch == ")")
        if ch == sep and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return parts


def _split_terms(src):
    terms, depth, cur, sign = [], 0, "", 1
    prev = ""
    for ch in src:
        depth += (ch == "(") - (ch == ")")
        if ch in "+-" and depth == 0 and prev not in ("^", "*", "/"):
            if cur.strip():
                terms.append((sign, cur))
            sign, cur = (1 if ch == "+" else -1), ""
        else:
            cur += ch
        if not ch.isspace():
            prev = ch
    if not cur.strip():
        raise ConfigError(f"empty term in {src!r}")
    terms.append((sign, cur))
    return terms


COMMANDS = {
    "check": cmd_check,
    "derive": cmd_derive,
    "normal-form": cmd_normal_form,
    "confluence": cmd_confluence,
    "complex": cmd_complex,
    "case2d": cmd_case2d,
    "hecke-build": cmd_hecke_build,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="derham", description="Checks and derivations for d^3 = 0 calculi.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("expr", nargs="?", help="element for normal-form, e.g. \"y*x\"")
    p.add_argument("--config", help="JSON AlgebraConfig file")
    p.add_argument("--out", help="write the report here instead of standard output")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--branch", choices=sorted(plane2d.BRANCHES), help="case2d: restrict to one Q branch")
    p.add_argument("--family", type=int, choices=(1, 2), help="case2d: restrict to one calculus family")
    p.add_argument("--max-len", type=int, default=4, help="complex: longest coordinate word tested")
    return p


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_intermixed_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    rep = Report(args.command)
    start = time.perf_counter()
    try:
        cfg = None
        if args.command != "case2d":
            if not args.config:
                raise ConfigError(f"{args.command} needs --config")
            cfg = load_config(args.config)
        COMMANDS[args.command](cfg, rep, args)
    except (ConfigError, ParseError, ConfigurationError, DimensionError, StructureError) as exc:
        print(f"derham: error: {exc}", file=sys.stderr)
        return 2
    rep.timing = time.perf_counter() - start
    text = rep.to_structured() if args.format == "structured" else rep.to_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    return 0 if rep.passed else 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
