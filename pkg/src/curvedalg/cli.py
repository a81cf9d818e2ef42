"""Command-line interface: load a problem description, run verifications
and constructions, emit a text or JSON report.

Usage::

    curvedalg run <spec-file> [--precision N] [--arity P]
                              [--window LO:HI] [--format json|text]
    curvedalg "<command>" <spec-file> [...]

The second form runs a single command from the same grammar used in the
file's ``commands`` array:

    verify | mc-check | curvature <target> | remove-curvature <target> <r>
    | build-mn <target> <n> | extension-search <n> | cohomology <target>
    | null-homotopy <target> | reduce <target>

Targets: ``A`` (the base object with zero connection), ``At`` (the formal
construction at working precision), ``Aprime`` (its reduction mod t).
``cohomology X`` reports the endomorphism complex of X.  All report values
are exact rationals and polynomial-in-t strings; the process exits 0 iff
every command passed or constructed its object.

Spec files are JSON; see fixtures/graded_field.spec and
fixtures/example_3_19.spec for the grammar.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import homology
from . import twisted as tw
from .deform import Deformation, build_Mn, build_formal_At, reduce_mod_t
from .hochschild import (Cochain, EvalContext, Unverified, arity0_component,
                         bracket, derivation_component, extension_search,
                         structure_from_quiver, table_component,
                         verify_structure)
from .quiver import HomElement, MonomialQuiver, TableQuiver
from .scalars import Field, QQ, TruncScalar


class SpecFileError(Exception):
    """A located parse or validation error in a problem file."""


# ---------------------------------------------------------------------------
# parsing


def _fail(path, message):
    raise SpecFileError("%s: %s" % (path, message))


def _expect(mapping, key, types, path, default=None, required=False):
    if key not in mapping:
        if required:
            _fail(path, "missing key %r" % key)
        return default
    value = mapping[key]
    if types is not None and not isinstance(value, types):
        _fail("%s.%s" % (path, key), "expected %s, got %r"
              % (types, type(value).__name__))
    return value


def parse_monomial_term(quiver, text, path="value"):
    """Parse 'coeff*gen^e*gen^e' into (Fraction, exponent tuple).

    '0' parses to None; '1' to the unit monomial.
    """
    text = text.strip()
    if text == "0":
        return None
    names = {name: idx for idx, (name, _, _, _)
             in enumerate(quiver.generators)}
    coeff = Fraction(1)
    exponents = [0] * len(quiver.generators)
    for factor in text.split("*"):
        factor = factor.strip()
        if not factor:
            _fail(path, "empty factor in %r" % text)
        if factor == "1":
            continue
        name, _, power = factor.partition("^")
        if name in names:
            try:
                exponents[names[name]] += int(power) if power else 1
            except ValueError:
                _fail(path, "bad exponent in %r" % factor)
            continue
        try:
            coeff *= Fraction(factor)
        except ValueError:
            _fail(path, "unknown factor %r" % factor)
    return coeff, tuple(exponents)


def _monomial_hom(ctx, text, path):
    parsed = parse_monomial_term(ctx.quiver, text, path)
    quiver = ctx.quiver
    if parsed is None:
        return None
    coeff, key = parsed
    degree = quiver._degree(key)
    return HomElement(quiver, quiver.OBJECT, quiver.OBJECT, degree,
                      {key: ctx.scalar(coeff)})


class ProblemSpec:
    """Validated contents of a problem file."""

    def __init__(self, field, precision, arity, window, base, components,
                 commands, search_options):
        self.field = field
        self.precision = precision
        self.arity = arity
        self.window = window
        self.base = base
        self.components = components
        self.commands = commands
        self.search_options = search_options


def parse_spec(path_or_file, overrides=None, extra_commands=()):
    """Read, validate and build a :class:`ProblemSpec` from a JSON file.

    ``extra_commands`` participate in working-precision padding (single
    command runs may need deeper scalars than the file's own commands).
    """
    overrides = overrides or {}
    if hasattr(path_or_file, "read"):
        text = path_or_file.read()
        name = getattr(path_or_file, "name", "<stream>")
    else:
        name = str(path_or_file)
        with open(path_or_file, "r", encoding="utf-8") as handle:
            text = handle.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError("%s:%d:%d: %s"
                            % (name, exc.lineno, exc.colno, exc.msg))
    if not isinstance(data, dict):
        raise SpecFileError("%s: top level must be an object" % name)

    field_name = _expect(data, "field", str, name, default="Q")
    if field_name in ("Q", "QQ"):
        field = QQ
    elif field_name.startswith("GF(") and field_name.endswith(")"):
        field = Field(int(field_name[3:-1]))
    else:
        _fail(name + ".field", "expected 'Q' or 'GF(p)'")
    precision = overrides.get("precision")
    if precision is None:
        precision = _expect(data, "precision", int, name, default=2)
    arity = overrides.get("arity")
    if arity is None:
        arity = _expect(data, "arity", int, name, default=4)
    window = overrides.get("window")
    if window is None:
        window = tuple(_expect(data, "window", list, name,
                               default=[-10, 10]))
    if len(window) != 2 or window[0] > window[1]:
        _fail(name + ".window", "expected [lo, hi]")

    algebra = _expect(data, "algebra", dict, name, required=True)
    backend = _expect(algebra, "backend", str, name + ".algebra",
                      default="monomial")
    if field.p and field.p <= arity:
        _fail(name + ".field",
              "characteristic must exceed the arity bound %d" % arity)

    commands = _expect(data, "commands", list, name, default=[])
    for idx, cmd in enumerate(commands):
        if not isinstance(cmd, str):
            _fail("%s.commands[%d]" % (name, idx), "expected a string")
    build_precision = precision
    for cmd in list(commands) + list(extra_commands):
        words = cmd.split()
        if words and words[0] in ("extension-search", "build-mn"):
            try:
                order = int(words[-1])
            except ValueError:
                continue
            build_precision = max(build_precision, order + 1)

    if backend == "monomial":
        base, ctx = _build_monomial(algebra, field, build_precision, arity,
                                    window, name + ".algebra")
    elif backend == "table":
        base, ctx = _build_table(algebra, field, build_precision, arity,
                                 window, name + ".algebra")
    else:
        _fail(name + ".algebra.backend", "unknown backend %r" % backend)

    components = _build_deformation(
        _expect(data, "deformation", dict, name, default={}),
        ctx, name + ".deformation")
    search = _expect(data, "search", dict, name, default={})
    search_options = {
        "window": tuple(search.get("window", (-4, 8))),
        "arity": search.get("arity", 2),
    }
    return ProblemSpec(field, precision, arity, window, base, components,
                       list(commands), search_options)


def _build_monomial(algebra, field, precision, arity, window, path):
    gens = _expect(algebra, "generators", list, path, required=True)
    caps = {}
    for rel in _expect(algebra, "relations", list, path, default=[]):
        if not isinstance(rel, str) or "^" not in rel:
            _fail(path + ".relations", "expected 'name^power' strings")
        rel_name, _, power = rel.partition("^")
        caps[rel_name.strip()] = int(power)
    spec = []
    for idx, gen in enumerate(gens):
        gpath = "%s.generators[%d]" % (path, idx)
        if not isinstance(gen, dict):
            _fail(gpath, "expected an object")
        gen_name = _expect(gen, "name", str, gpath, required=True)
        degree = _expect(gen, "degree", int, gpath, required=True)
        invertible = bool(gen.get("invertible", False))
        cap = caps.get(gen_name)
        spec.append((gen_name, degree, cap, invertible))
    quiver = MonomialQuiver(spec)
    ctx = EvalContext(quiver, field, precision, arity, window)
    mu = structure_from_quiver(ctx)
    unit = HomElement(quiver, quiver.OBJECT, quiver.OBJECT, 0,
                      {quiver.unit_key: ctx.scalar(1)})
    try:
        base = verify_structure(mu, units={quiver.OBJECT: unit})
    except Unverified as exc:
        _fail(path, "algebra does not verify: %s" % exc)
    return base, ctx


def _build_table(algebra, field, precision, arity, window, path):
    objects = _expect(algebra, "objects", list, path, default=["O"])
    morphisms = []
    for idx, mor in enumerate(_expect(algebra, "basis", list, path,
                                      required=True)):
        mpath = "%s.basis[%d]" % (path, idx)
        morphisms.append((
            _expect(mor, "source", str, mpath, default=objects[0]),
            _expect(mor, "target", str, mpath, default=objects[0]),
            _expect(mor, "key", str, mpath, required=True),
            _expect(mor, "degree", int, mpath, required=True)))
    product = {}
    for idx, row in enumerate(_expect(algebra, "products", list, path,
                                      default=[])):
        ppath = "%s.products[%d]" % (path, idx)
        terms = [(Fraction(str(t.get("coeff", 1))), t["key"])
                 for t in _expect(row, "terms", list, ppath, default=[])]
        product[(row["left"], row["right"])] = terms
    differential = {}
    for idx, row in enumerate(_expect(algebra, "differential", list, path,
                                      default=[])):
        terms = [(Fraction(str(t.get("coeff", 1))), t["key"])
                 for t in row.get("terms", [])]
        differential[row["key"]] = terms
    quiver = TableQuiver(objects, morphisms, window, product, differential)
    ctx = EvalContext(quiver, field, precision, arity, window)
    mu = structure_from_quiver(ctx)
    units = {}
    unit_spec = _expect(algebra, "unit", (str, dict), path, default=None)
    if isinstance(unit_spec, str):
        mor = quiver.mor(unit_spec)
        units[mor.source] = quiver.basis_element(mor, ctx.scalar(1))
    elif isinstance(unit_spec, dict):
        for obj, key in unit_spec.items():
            units[obj] = quiver.basis_element(quiver.mor(key), ctx.scalar(1))
    try:
        base = verify_structure(mu, units=units)
    except Unverified as exc:
        _fail(path, "algebra does not verify: %s" % exc)
    return base, ctx


def _build_deformation(deformation, ctx, path):
    components = {}
    quiver = ctx.quiver
    rows = _expect(deformation, "components", list, path, default=[])
    for idx, row in enumerate(rows):
        rpath = "%s.components[%d]" % (path, idx)
        order = _expect(row, "order", int, rpath, required=True)
        arity = _expect(row, "arity", int, rpath, required=True)
        if order < 1:
            _fail(rpath, "orders start at 1")
        if not isinstance(quiver, MonomialQuiver):
            _fail(rpath, "deformation components need the monomial backend")
        if arity == 0:
            value = _monomial_hom(ctx, _expect(row, "output", str, rpath,
                                               required=True), rpath)
            if value is None:
                continue
            if value.degree != 2:
                _fail(rpath, "arity-0 components must have degree 2")
            comp = {0: arity0_component(ctx, 2, {quiver.OBJECT: value})}
        elif arity == 1 and row.get("leibniz"):
            gen_values = [None] * len(quiver.generators)
            degree = None
            for entry in _expect(row, "table", list, rpath, required=True):
                inputs = entry.get("inputs", [])
                if len(inputs) != 1:
                    _fail(rpath, "leibniz tables map single generators")
                parsed = parse_monomial_term(quiver, inputs[0], rpath)
                if parsed is None:
                    _fail(rpath, "bad generator %r" % inputs[0])
                _, key = parsed
                if sum(key) != 1:
                    _fail(rpath, "leibniz inputs must be generators")
                gidx = key.index(1)
                value = _monomial_hom(ctx, entry.get("output", "0"), rpath)
                gen_values[gidx] = value
                if value is not None:
                    d = value.degree - quiver.generators[gidx][1]
                    if degree is not None and degree != d:
                        _fail(rpath, "inconsistent derivation degree")
                    degree = d
            if degree is None:
                continue
            comp = {1: derivation_component(ctx, gen_values, degree)}
        else:
            table = {}
            for entry in _expect(row, "table", list, rpath, required=True):
                inputs = tuple(entry.get("inputs", []))
                if len(inputs) != arity:
                    _fail(rpath, "wrong tuple length in table")
                keys = []
                for text in inputs:
                    parsed = parse_monomial_term(quiver, text, rpath)
                    if parsed is None or parsed[0] != 1:
                        _fail(rpath, "inputs must be plain monomials")
                    keys.append(parsed[1])
                value = _monomial_hom(ctx, entry.get("output", "0"), rpath)
                if value is not None:
                    table[tuple(keys)] = value
            comp = {arity: table_component(ctx, 2, arity, table)}
        cochain = Cochain(ctx, 2, comp)
        if order in components:
            components[order] = components[order] + cochain
        else:
            components[order] = cochain
    return components


# ---------------------------------------------------------------------------
# running commands


def _matrix_json(matrix):
    out = {}
    for (j, i), e in sorted(matrix.entries.items()):
        out["(%d,%d)" % (j, i)] = str(e)
    return out


def _twisted_json(obj):
    return {"summands": [[str(o), s] for o, s in obj.free.summands],
            "connection": _matrix_json(obj.connection),
            "certificate": str(obj.certificate)}


def _parse_r(ctx, token):
    if token == "1":
        return ctx.scalar(1)
    if token == "t":
        return ctx.t_power(1)
    if token.startswith("t^"):
        return ctx.t_power(int(token[2:]))
    raise SpecFileError("cannot parse scalar %r (use 1, t or t^k)" % token)


class CommandRunner:
    def __init__(self, spec):
        self.spec = spec
        self.deformation = Deformation(spec.base, spec.components)
        self._cache = {}

    def target(self, name):
        if name in self._cache:
            return self._cache[name]
        quiver = self.spec.base.quiver
        if name == "A":
            obj = tw.zero_connection_object(quiver.objects[0], name="A")
            struct = self.deformation.structure(self.spec.precision)
        elif name == "At":
            A, _ = self.target("A")
            obj = build_formal_At(self.deformation, A, self.spec.precision)
            struct = self.deformation.structure(self.spec.precision - 1)
        elif name == "Aprime":
            At, _ = self.target("At")
            obj = reduce_mod_t(At, name="Aprime")
            struct = self.deformation.structure(0)
        else:
            raise SpecFileError("unknown target %r" % name)
        self._cache[name] = (obj, struct)
        return obj, struct

    def run_command(self, command):
        words = command.split()
        if not words:
            raise SpecFileError("empty command")
        head, args = words[0], words[1:]
        handler = {
            "verify": self._cmd_verify,
            "mc-check": self._cmd_mc_check,
            "curvature": self._cmd_curvature,
            "remove-curvature": self._cmd_remove_curvature,
            "build-mn": self._cmd_build_mn,
            "extension-search": self._cmd_extension_search,
            "cohomology": self._cmd_cohomology,
            "null-homotopy": self._cmd_null_homotopy,
            "reduce": self._cmd_reduce,
        }.get(head)
        if handler is None:
            raise SpecFileError("unknown command %r" % head)
        return handler(args)

    def _cmd_verify(self, args):
        base = self.spec.base
        struct = self.deformation.structure(self.spec.precision)
        try:
            verify_structure(struct.cochain, units=struct.units,
                             window=self.spec.window,
                             arity_bound=self.spec.arity)
        except Unverified as exc:
            return "fail", {"witness": str(exc)}
        return "pass", {"strictly_unital": struct.strictly_unital,
                        "window": list(self.spec.window),
                        "arity": self.spec.arity}

    def _cmd_mc_check(self, args):
        ok, residual = self.deformation.mc_verify(self.spec.precision)
        details = {"precision": self.spec.precision}
        if not ok:
            witness = residual.first_nonzero()
            details["witness"] = {"arity": witness[0], "at": str(witness[1]),
                                  "value": str(witness[2])}
        return ("pass" if ok else "fail"), details

    def _cmd_curvature(self, args):
        obj, struct = self.target(args[0])
        c = tw.curvature(struct, obj)
        return "constructed", {"target": args[0],
                               "object": _twisted_json(obj),
                               "curvature": _matrix_json(c),
                               "zero": c.is_zero()}

    def _cmd_remove_curvature(self, args):
        name, r_token = args[0], args[1]
        obj, struct = self.target(name)
        r = _parse_r(struct.ctx, r_token)
        c = tw.curvature(struct, obj)
        t_exponent = 0 if r_token == "1" else \
            (1 if r_token == "t" else int(r_token[2:]))
        c_over = c
        for _ in range(t_exponent):
            c_over = tw.matrix_divide_by_t_exact(c_over)
        removed = tw.remove_curvature(struct, obj, r, c_over)
        residual = tw.curvature(struct, removed)
        return "constructed", {"target": name, "r": r_token,
                               "object": _twisted_json(removed),
                               "curvature": _matrix_json(residual),
                               "curvature_zero": residual.is_zero()}

    def _cmd_build_mn(self, args):
        name, n = args[0], int(args[1])
        obj, _ = self.target(name)
        built = build_Mn(self.deformation, obj, n)
        struct = self.deformation.structure(n)
        residual = tw.curvature(struct, built)
        return "constructed", {"target": name, "n": n,
                               "object": _twisted_json(built),
                               "curvature_zero": residual.is_zero()}

    def _cmd_extension_search(self, args):
        order = int(args[0])
        opts = self.spec.search_options
        result = extension_search(
            self.spec.base, self.spec.components, order,
            window=opts["window"], arity_bound=opts["arity"] + 1)
        if "extension" in result:
            found = result["extension"]
            witness = found.first_nonzero(opts["window"])
            return "extension", {
                "order": order + 1,
                "value": "0" if witness is None else
                "arity %d at %s: %s" % (witness[0], witness[1],
                                        str(witness[2]))}
        ob = result["obstruction"]
        residual = ob.residual
        arity0 = residual.at_object(self.spec.base.quiver.objects[0])
        psi = None
        for k, comp in sorted(self.spec.components.items()):
            piece = comp.truncate(order + 1).t_multiple(k)
            psi = piece if psi is None else psi + piece
        bracket_part = "0"
        if psi is not None:
            br = bracket(psi, psi).t_coefficient(order + 1)
            bracket_part = str(br.at_object(self.spec.base.quiver.objects[0]))
        return "obstruction", {
            "order": ob.order,
            "residual_arity0": str(arity0),
            "bracket_arity0": bracket_part}

    def _cmd_cohomology(self, args):
        obj, struct = self.target(args[0])
        window = self.spec.window
        lo = max(window[0], -6)
        hi = min(window[1], 6)
        dims = homology.cohomology(struct, obj, (lo, hi))
        return "constructed", {
            "target": args[0], "window": [lo, hi],
            "dimensions": {str(n): dims[n] for n in sorted(dims)},
            "all_zero": all(v == 0 for v in dims.values())}

    def _cmd_null_homotopy(self, args):
        obj, struct = self.target(args[0])
        try:
            h = homology.null_homotopy(struct, obj, self.spec.window)
        except homology.NoSolution as exc:
            return "no-solution", {"target": args[0], "reason": str(exc)}
        return "constructed", {"target": args[0],
                               "homotopy": _matrix_json(h)}

    def _cmd_reduce(self, args):
        obj, struct = self.target(args[0])
        reduced = reduce_mod_t(obj)
        return "constructed", {"target": args[0],
                               "object": _twisted_json(reduced)}


PASSING = {"pass", "constructed", "extension"}


def run(spec, commands=None):
    """Execute commands against a parsed spec; returns the report dict."""
    runner = CommandRunner(spec)
    entries = []
    for command in (commands if commands is not None else spec.commands):
        try:
            status, details = runner.run_command(command)
        except SpecFileError:
            raise
        except Exception as exc:   # command-level failures stay in-report
            status, details = "error", {"error": "%s: %s"
                                        % (type(exc).__name__, exc)}
        entries.append({"command": command, "status": status,
                        "details": details})
    passed = sum(1 for e in entries if e["status"] in PASSING)
    report = {
        "tool": "curvedalg",
        "format_version": 1,
        "parameters": {"field": repr(spec.field),
                       "precision": spec.precision,
                       "arity": spec.arity,
                       "window": list(spec.window)},
        "commands": entries,
        "summary": {"total": len(entries), "passed": passed,
                    "failed": len(entries) - passed},
    }
    return report


def render_text(report):
    lines = []
    params = report["parameters"]
    lines.append("curvedalg report (field %s, precision %d, arity %d, "
                 "window %s)" % (params["field"], params["precision"],
                                 params["arity"], params["window"]))
    for entry in report["commands"]:
        lines.append("  [%s] %s" % (entry["status"], entry["command"]))
        for key, value in sorted(entry["details"].items()):
            lines.append("      %s: %s" % (key, value))
    summary = report["summary"]
    lines.append("summary: %d/%d passed" % (summary["passed"],
                                            summary["total"]))
    return "\n".join(lines)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="curvedalg",
        description="exact curved deformation calculus on problem files")
    parser.add_argument("command",
                        help="'run' for the file's command list, or a single "
                             "command string like 'curvature At'")
    parser.add_argument("specfile", help="JSON problem file")
    parser.add_argument("--precision", type=int, default=None)
    parser.add_argument("--arity", type=int, default=None)
    parser.add_argument("--window", type=str, default=None,
                        help="LO:HI degree window")
    parser.add_argument("--format", choices=("json", "text"),
                        default="text")
    args = parser.parse_args(argv)

    overrides = {}
    if args.precision is not None:
        overrides["precision"] = args.precision
    if args.arity is not None:
        overrides["arity"] = args.arity
    if args.window is not None:
        lo, _, hi = args.window.partition(":")
        overrides["window"] = (int(lo), int(hi))
    try:
        extra = () if args.command == "run" else (args.command,)
        spec = parse_spec(args.specfile, overrides, extra_commands=extra)
        commands = None if args.command == "run" else [args.command]
        report = run(spec, commands)
    except SpecFileError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    if args.format == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(render_text(report))
    ok = all(e["status"] in PASSING for e in report["commands"])
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
