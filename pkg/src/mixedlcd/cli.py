"""Command-line front end.

Every command prints a text report and, with ``--out DIR``, also writes
``<command>.json`` (and CSV tables where they exist). JSON reports carry
``schema: 1``, are key-sorted and hold no timestamps, so identical inputs
give byte-identical files whatever ``--jobs`` is.

Exit codes: 0 success, 1 a check-style verdict is false, 2 input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import lcp as lcp_mod
from .enumerate import (DEFAULT_BUDGET, BudgetExceeded, classify_monomial, count_report,
                        enumerate_lcd, type_counts, verify_appendix)
from .fixtures import builtin_names, builtin_text, load_pair, parse_appendix_list
from .lcd import is_lcd
from .metrics import code_distances, lee_supported, word_hamming_weights, word_lee_weights
from .space import (MixedShape, dual_code_algebraic, parse_code_text, render_code_file,
                    span_closure)

SCHEMA = 1
EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    """Bad user input; reported with exit code 2."""


class Report:
    """Collects text lines, a JSON payload and optional CSV tables for one command."""

    def __init__(self, command: str):
        self.command = command
        self.lines: list[str] = []
        self.data: dict = {"schema": SCHEMA, "command": command}
        self.tables: dict[str, list[list]] = {}

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"

    def json_text(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2, default=_json_default) + "\n"

    def write(self, out_dir: str | None) -> None:
        if not out_dir:
            return
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{self.command}.json").write_text(self.json_text())
        (d / f"{self.command}.txt").write_text(self.text())
        for name, rows in self.tables.items():
            buf = io.StringIO()
            csv.writer(buf, lineterminator="\n").writerows(rows)
            (d / f"{name}.csv").write_text(buf.getvalue())


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, bytes):
        return obj.hex()
    raise TypeError(f"not serialisable: {type(obj).__name__}")


def _flag(v: bool) -> str:
    return "true" if v else "false"


# -- inputs ------------------------------------------------------------------------

def _read_source(name: str) -> str:
    """Text of a file path, falling back to a built-in fixture of that name."""
    p = Path(name)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    try:
        return builtin_text(name)
    except ValueError:
        raise InputError(f"no such file or built-in fixture: {name!r}") from None


def _load_code(name: str) -> tuple[MixedShape, np.ndarray]:
    try:
        return parse_code_text(_read_source(name))
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"malformed code file {name!r}: {exc}") from None


def _load_pair(args) -> tuple[MixedShape, np.ndarray, np.ndarray]:
    if args.builtin:
        try:
            return load_pair(args.builtin)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if not args.codes or len(args.codes) != 2:
        raise InputError("give two code files C and D, or --builtin NAME")
    sh1, G = _load_code(args.codes[0])
    sh2, H = _load_code(args.codes[1])
    if sh1 != sh2:
        raise InputError("the two codes live in different modules")
    return sh1, G, H


def _single_code(args) -> tuple[MixedShape, np.ndarray]:
    name = args.builtin or args.code
    if not name:
        raise InputError("give a code file or --builtin NAME")
    return _load_code(name)


def _shape_from_flags(args) -> MixedShape:
    if not args.ring or not args.blocks:
        raise InputError("--ring and --blocks are required")
    try:
        return MixedShape(args.ring, args.s, *args.blocks)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _check_h(shape: MixedShape, h: int) -> None:
    try:
        shape.R.check_h(h)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _parse_param(shape: MixedShape, text: str, k: int, l: int, what: str) -> np.ndarray:
    toks = text.replace("|", " ").split()
    if len(toks) != k + l:
        raise InputError(f"{what} needs {k} + {l} entries, got {len(toks)}")
    try:
        return np.array([shape.R.parse(t) for t in toks[:k]]
                        + [shape.Rc.parse(t) for t in toks[k:]], dtype=np.int64)
    except ValueError as exc:
        raise InputError(f"{what}: {exc}") from None


def _parse_word(shape: MixedShape, text: str) -> np.ndarray:
    try:
        return shape.parse_word(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _render_param(shape: MixedShape, v, k: int) -> str:
    left = [shape.R.render(int(x)) for x in v[:k]]
    right = [shape.Rc.render(int(x)) for x in v[k:]]
    return "(" + " ".join(left) + " | " + " ".join(right) + ")"


def _rows_text(shape: MixedShape, G) -> list[str]:
    return [shape.render_word(r) for r in G]


def _shape_json(shape: MixedShape) -> dict:
    return {"ring": shape.R.name, "s": shape.s, "a": shape.a, "b": shape.b}


# -- commands ------------------------------------------------------------------------

def cmd_check(args, rep: Report) -> int:
    shape, G = _single_code(args)
    _check_h(shape, args.h)
    C = span_closure(shape, G)
    criteria = ["bruteforce", "gram", "residue"] if args.criterion == "all" else [args.criterion]
    verdicts = {c: is_lcd(C, args.h, c) for c in criteria}
    main = verdicts[criteria[0]]
    rep.data.update({"shape": _shape_json(shape), "h": args.h, "type": str(C.type),
                     "size": C.size, "lcd": main.is_lcd,
                     "criteria": {c: v.is_lcd for c, v in verdicts.items()}})
    rep.say(f"module: {shape.label}")
    rep.say(f"type: {C.type}   |C| = {C.size}   h = {args.h}")
    for c, v in verdicts.items():
        extra = f" ({v.evidence['reason']})" if "reason" in v.evidence else ""
        rep.say(f"  {c}: {_flag(v.is_lcd)}{extra}")
    witness = verdicts.get("bruteforce", main).witness
    if witness is not None:
        rep.data["witness"] = shape.render_word(witness)
        rep.say(f"witness in the hull: ({shape.render_word(witness)})")
    if len({v.is_lcd for v in verdicts.values()}) > 1:
        rep.say("warning: criteria disagree; the brute-force verdict is authoritative")
        rep.data["disagreement"] = True
    rep.say(f"LCD: {_flag(main.is_lcd)}")
    return EXIT_OK if main.is_lcd else EXIT_FALSE


def cmd_dual(args, rep: Report) -> int:
    shape, G = _single_code(args)
    _check_h(shape, args.h)
    C = span_closure(shape, G)
    Dual = dual_code_algebraic(C, args.h)
    rows = Dual.standard.rows
    rep.data.update({"shape": _shape_json(shape), "h": args.h,
                     "code": {"type": str(C.type), "size": C.size},
                     "dual": {"type": str(Dual.type), "size": Dual.size,
                              "rows": _rows_text(shape, rows)},
                     "size_product_ok": C.size * Dual.size == shape.order})
    rep.say(f"# dual (h = {args.h}) of a code of type {C.type}, |C| = {C.size}")
    rep.say(f"# dual type {Dual.type}, |C^perp| = {Dual.size}, |C||C^perp| = |M|: "
            f"{_flag(C.size * Dual.size == shape.order)}")
    rep.lines.extend(render_code_file(shape, rows).rstrip("\n").splitlines())
    return EXIT_OK


def cmd_distance(args, rep: Report) -> int:
    shape, G = _single_code(args)
    C = span_closure(shape, G)
    prof = code_distances(C)
    ham = word_hamming_weights(C.digits)
    table = [["weight", "hamming", "lee"]]
    lee = word_lee_weights(shape, C.digits) if lee_supported(shape) else None
    top = max(int(ham.max()), int(lee.max()) if lee is not None else 0)
    hc = np.bincount(ham, minlength=top + 1)
    lc = np.bincount(lee, minlength=top + 1) if lee is not None else None
    for wgt in range(top + 1):
        table.append([wgt, int(hc[wgt]), int(lc[wgt]) if lc is not None else ""])
    rep.tables["weights"] = table
    rep.data.update({"shape": _shape_json(shape), "type": str(C.type), "size": C.size,
                     "min_hamming": prof.min_hamming, "min_lee": prof.min_lee,
                     "hamming_enumerator": list(prof.hamming_enumerator),
                     "lee_enumerator": {str(k): v for k, v in prof.lee_multiset.items()}})
    rep.say(f"type: {C.type}   |C| = {C.size}")
    rep.say(f"minimum Hamming distance: {prof.min_hamming}")
    rep.say(f"minimum Lee distance: {prof.min_lee if prof.min_lee is not None else 'n/a'}")
    rep.say("weight  hamming  lee")
    for wgt, h, l in table[1:]:
        rep.say(f"{wgt:>6}  {h:>7}  {l:>3}")
    return EXIT_OK


def _variant_h(shape: MixedShape, variant: str) -> int:
    if variant == "hermitian":
        if shape.R.w % 2:
            raise InputError(f"hermitian variant needs an even extension degree, "
                             f"{shape.R.name} has w={shape.R.w}")
        return shape.R.w // 2
    return 0


def _lcd_codes(shape: MixedShape, h: int, args) -> list:
    return list(enumerate_lcd(shape, h, args.budget, args.jobs))


def cmd_counts(args, rep: Report) -> int:
    shape = _shape_from_flags(args)
    _variant_h(shape, args.variant)
    r, _ = count_report(shape, args.variant, bruteforce=not args.no_bruteforce,
                        classify=args.classify, budget=args.budget, jobs=args.jobs)
    rep.data.update(r.to_json())
    rep.data["command"] = "counts"
    table = [["k0", "l0", "formula", "bruteforce"]]
    rep.say(f"module: {shape.label}   variant: {args.variant} (h = {r.h})")
    rep.say(" k0  l0  formula  bruteforce")
    for row in r.rows:
        bf = "" if row["bruteforce"] is None else row["bruteforce"]
        table.append([row["k0"], row["l0"], row["formula"], bf])
        rep.say(f"{row['k0']:>3} {row['l0']:>3} {row['formula']:>8} {bf!s:>11}")
    rep.tables["counts"] = table

    def show(v):
        return "-" if v is None else str(v)
    rep.say(f"non-zero: formula {r.formula_nonzero}, bruteforce {show(r.bruteforce_nonzero)}, "
            f"table {show(r.table_nonzero)}")
    if args.classify:
        rep.say(f"classes: bruteforce {show(r.classes)}, table {show(r.table_classes)}")
    rep.say(f"mismatches: {len(r.mismatches)}")
    for m in r.mismatches:
        rep.say(f"  {m}")
    if r.mismatches and not args.no_bruteforce:
        rep.say("authoritative: bruteforce")
    return EXIT_OK


def cmd_enumerate(args, rep: Report) -> int:
    shape = _shape_from_flags(args)
    _check_h(shape, args.h)
    codes = _lcd_codes(shape, args.h, args)
    per = type_counts(codes)
    listing = [{"type": str(C.type), "size": C.size,
                "rows": _rows_text(shape, C.standard.rows)} for C in codes]
    rep.data.update({"shape": _shape_json(shape), "h": args.h, "count": len(codes),
                     "nonzero": len(codes) - 1,
                     "per_type": {f"{k},{l}": v for (k, l), v in sorted(per.items())},
                     "codes": listing})
    rep.say(f"module: {shape.label}   h = {args.h}")
    rep.say(f"LCD codes: {len(codes)} ({len(codes) - 1} non-zero)")
    for (k, l), v in sorted(per.items()):
        rep.say(f"  type ({k},{l}): {v}")
    if args.list:
        for i, item in enumerate(listing):
            rep.say(f"[{i}] {item['type']}  " + " ; ".join(item["rows"]))
    return EXIT_OK


def cmd_classify(args, rep: Report) -> int:
    shape = _shape_from_flags(args)
    _check_h(shape, args.h)
    codes = [C for C in _lcd_codes(shape, args.h, args) if C.size > 1]
    res = classify_monomial(codes, args.jobs)
    classes = []
    for ci in res.classes:
        classes.append({"type": str(ci.type), "orbit_size": ci.orbit_size,
                        "members": ci.members, "lee": ci.lee_distance,
                        "hamming": ci.hamming_distance,
                        "rows": _rows_text(shape, ci.canonical.standard.rows),
                        "fingerprint": ci.canonical.fingerprint})
    rep.data.update({"shape": _shape_json(shape), "h": args.h, "codes": len(codes),
                     "classes": res.count, "group_order": res.group_order,
                     "representatives": classes})
    rep.say(f"module: {shape.label}   h = {args.h}   monomial group order {res.group_order}")
    rep.say(f"non-zero LCD codes: {len(codes)}   classes: {res.count}")
    for i, c in enumerate(classes):
        rep.say(f"[{i}] {c['type']} lee={c['lee']} hamming={c['hamming']} "
                f"orbit={c['members']}  " + " ; ".join(c["rows"]))
    return EXIT_OK


def cmd_verify_appendix(args, rep: Report) -> int:
    try:
        al = parse_appendix_list(_read_source(args.name))
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"malformed appendix list {args.name!r}: {exc}") from None
    census = None
    if args.completeness:
        codes = [C for C in _lcd_codes(al.shape, al.h, args) if C.size > 1]
        census = classify_monomial(codes, args.jobs)
    r = verify_appendix(al.entries, al.shape, al.h, census)
    checks = "i,ii,iii,iv" if args.completeness else "i,ii,iii"
    ok = r.passed(checks)
    ents = r.entries
    n = len(ents)
    parsed = [e for e in ents if e.parse_error is None]
    summary = {
        "parsed": len(parsed),
        "lcd": sum(bool(e.is_lcd) for e in parsed),
        "lee": sum(bool(e.lee_ok) for e in parsed),
        "inequivalent": sum(bool(e.inequivalent) for e in parsed),
    }
    rep.say(f"{args.name}: {al.shape.label}, h = {al.h}, {n} entries, {al.classes} classes stated")
    rep.say(f"  parsed:                 {summary['parsed']}/{n}")
    rep.say(f"  (i)   LCD:              {summary['lcd']}/{n}")
    rep.say(f"  (ii)  Lee distance:     {summary['lee']}/{n}")
    rep.say(f"  (iii) inequivalent:     {summary['inequivalent']}/{n}")
    if census is not None:
        summary["census_classes"] = census.count
        summary["missing_classes"] = r.missing_classes
        hits = sum(bool(e.complete_hit) for e in parsed)
        summary["in_census"] = hits
        rep.say(f"  (iv)  in census:        {hits}/{n}; census classes {census.count}, "
                f"missing from list {r.missing_classes}")
    entries = []
    for e in ents:
        item = {"index": e.index, "claimed_lee": e.claimed_lee, "parse_error": e.parse_error,
                "lcd": e.is_lcd, "lee": e.lee, "lee_ok": e.lee_ok,
                "inequivalent": e.inequivalent, "duplicate_of": e.duplicate_of,
                "in_census": e.complete_hit}
        entries.append(item)
        problems = []
        if e.parse_error:
            problems.append(f"parse error: {e.parse_error}")
        else:
            if not e.is_lcd:
                problems.append("not LCD")
            if not e.lee_ok:
                problems.append(f"Lee distance {e.lee}, stated {e.claimed_lee}")
            if not e.inequivalent:
                problems.append(f"equivalent to entry {e.duplicate_of}")
            if census is not None and not e.complete_hit:
                problems.append("not in the census")
        if problems:
            rep.say(f"  entry {e.index}: " + "; ".join(problems))
    rep.data.update({"list": args.name, "shape": _shape_json(al.shape), "h": al.h,
                     "stated_classes": al.classes, "entries": entries, "summary": summary,
                     "passed": ok})
    rep.say(f"verdict: {'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_FALSE


def _thresholds(scheme, which: str) -> dict:
    variants = ["general", "separable", "embedded"] if which == "all" else [which]
    out = {}
    for v in variants:
        t = lcp_mod.security_threshold(scheme, v)
        out[v] = {"threshold": t.threshold, "components": t.components}
    return out


def cmd_lcp(args, rep: Report) -> int:
    shape, G, H = _load_pair(args)
    C, D = span_closure(shape, G), span_closure(shape, H)
    verdicts = {c: lcp_mod.is_lcp(C, D, c) for c in ("direct", "gram", "residue")}
    ok = verdicts["direct"].is_lcp
    rep.data.update({"shape": _shape_json(shape), "types": [str(C.type), str(D.type)],
                     "criteria": {c: v.is_lcp for c, v in verdicts.items()}, "lcp": ok})
    rep.say(f"module: {shape.label}")
    rep.say(f"types: C {C.type}, D {D.type}")
    for c, v in verdicts.items():
        extra = f" ({v.evidence['reason']})" if "reason" in v.evidence else ""
        rep.say(f"  {c}: {_flag(v.is_lcp)}{extra}")
    if ok:
        scheme = lcp_mod.build_scheme(C, D)
        th = _thresholds(scheme, args.threshold)
        rep.data["thresholds"] = th
        for v, t in th.items():
            comp = ", ".join(f"{k}={_flag(val) if isinstance(val, bool) else val}"
                             for k, val in t["components"].items())
            rep.say(f"threshold ({v}): {t['threshold']}   [{comp}]")
    rep.say(f"LCP: {_flag(ok)}")
    return EXIT_OK if ok else EXIT_FALSE


def _scheme_from_args(args):
    shape, G, H = _load_pair(args)
    C, D = span_closure(shape, G), span_closure(shape, H)
    try:
        return lcp_mod.build_scheme(C, D, G, H)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _random_param(rng, shape: MixedShape, k: int, l: int) -> np.ndarray:
    return np.concatenate([rng.integers(0, shape.R.size, k),
                           rng.integers(0, shape.Rc.size, l)]).astype(np.int64)


def cmd_dsm_demo(args, rep: Report) -> int:
    S = _scheme_from_args(args)
    sh = S.shape
    k, l = S.k0, S.l0
    ky, ly = sh.a - k, sh.b - l
    rng = np.random.default_rng(args.seed)
    x = _parse_param(sh, args.x, k, l, "--x") if args.x else _random_param(rng, sh, k, l)
    y = _parse_param(sh, args.y, ky, ly, "--y") if args.y else _random_param(rng, sh, ky, ly)
    f = _random_param(rng, sh, k, l)
    ok = True
    log: dict = {"shape": _shape_json(sh), "types": [str(S.C.type), str(S.D.type)]}

    def px(v):
        return _render_param(sh, v, k)

    def py(v):
        return _render_param(sh, v, ky)

    rep.say(f"module: {sh.label}   C {S.C.type}   D {S.D.type}")
    rep.say(f"sensitive x = {px(x)}")
    rep.say(f"mask y      = {py(y)}")
    z = lcp_mod.dsm_encode(S, x, y)
    rep.say(f"z = xG + yH = ({sh.render_word(z)})")
    rx, ry = lcp_mod.dsm_recover(S, z)
    good = np.array_equal(rx, x) and np.array_equal(ry, y)
    ok &= good
    rep.say(f"recovered x = {px(rx)}, y = {py(ry)}: {_flag(good)}")
    log["encode"] = {"x": px(x), "y": py(y), "z": sh.render_word(z), "round_trip": good}

    steps = {}
    z1 = lcp_mod.masked_ops(S, z, "key_add", f=f)
    want = np.concatenate([sh.R.add[x[:k], f[:k]], sh.Rc.add[x[k:], f[k:]]])
    got, gy = lcp_mod.dsm_recover(S, z1)
    good = np.array_equal(got, want) and np.array_equal(gy, y)
    steps["key_add"] = {"key": px(f), "z": sh.render_word(z1), "x": px(got), "ok": good}
    rep.say(f"key addition with f = {px(f)}:")
    rep.say(f"  z' = ({sh.render_word(z1)}) -> x' = {px(got)}: {_flag(good)}")
    ok &= good
    cube = lcp_mod.cube_table(sh.R)
    z2 = lcp_mod.masked_ops(S, z, "nonlinear", S1=cube)
    want = np.concatenate([cube(x[:k]), x[k:]])
    got, gy = lcp_mod.dsm_recover(S, z2)
    good = np.array_equal(got, want) and np.array_equal(gy, y)
    steps["nonlinear"] = {"z": sh.render_word(z2), "x": px(got), "ok": good}
    rep.say("non-linear step (cube the first part, keep the second):")
    rep.say(f"  z' = ({sh.render_word(z2)}) -> x' = {px(got)}: {_flag(good)}")
    ok &= good
    log["steps"] = steps

    fia = {}
    e1 = np.zeros(sh.n, dtype=np.int64)
    e1[0] = 1
    fia["weight_1"] = lcp_mod.fia_detect(S, z, e1)
    cw = lcp_mod.min_weight_codeword(S.C)
    if cw is not None:
        fia["min_weight_codeword"] = lcp_mod.fia_detect(S, z, cw)
    rep.say(f"fault of weight 1 at coordinate 0: {fia['weight_1']}")
    if cw is not None:
        rep.say(f"fault = minimum-weight codeword ({sh.render_word(cw)}), weight "
                f"{int(np.count_nonzero(cw))} = d_H(C): {fia['min_weight_codeword']}")
    good = fia["weight_1"] == lcp_mod.FIA_DETECTED or (S.d_C is not None and S.d_C <= 1)
    ok &= good
    log["fia"] = fia

    bx, by = S.d_DX_dual, S.d_DY_dual
    T1 = list(range(min(sh.a, (bx or 1) - 1)))
    T2 = list(range(min(sh.b, (by or 1) - 1)))
    sca = lcp_mod.sca_leakage_check(S, T1, T2, x)
    rep.say(f"leakage T1 = {T1}, T2 = {T2} (bounds {bx}, {by}): {sca.verdict}; "
            f"spanning {_flag(sca.spans)}; uniform "
            f"{'n/a' if sca.uniform is None else _flag(sca.uniform)}; histogram {sca.histogram}")
    log["sca"] = {"T1": T1, "T2": T2, "bounds": [bx, by], "verdict": sca.verdict,
                  "spans": sca.spans, "uniform": sca.uniform, "histogram": sca.histogram}
    if sca.safe:
        ok &= bool(sca.spans) and sca.uniform is not False
    th = S.threshold
    rep.say(f"security threshold: {th}")
    log["threshold"] = th
    log["ok"] = bool(ok)
    rep.data.update(log)
    rep.say(f"demo: {'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_FALSE


def cmd_adder_demo(args, rep: Report) -> int:
    S = _scheme_from_args(args)
    sh = S.shape
    if args.z:
        z = _parse_word(sh, args.z)
    elif args.builtin and f"{args.builtin}Z" in builtin_names():
        z = _load_code(f"{args.builtin}Z")[1][0]
    else:
        rng = np.random.default_rng(args.seed)
        c0 = S.C.digits[rng.integers(S.C.size)]
        d0 = S.D.digits[rng.integers(S.D.size)]
        rep.say(f"sent c = ({sh.render_word(c0)})")
        rep.say(f"sent d = ({sh.render_word(d0)})")
        z = sh.add(c0, d0)
    rep.say(f"module: {sh.label}   C {S.C.type}   D {S.D.type}")
    rep.say(f"received z = ({sh.render_word(z)})")
    p1 = lcp_mod.psi1(S, z)[0]
    rep.say("Psi1(z) = (" + " ".join(sh.R.render(int(v)) for v in p1) + ")")
    c, d = lcp_mod.adder_recover(S, z)
    inC, inD = S.C.contains(c), S.D.contains(d)
    rep.say(f"c in C: {_flag(inC)}   d in D: {_flag(inD)}")
    rep.say(f"recovered c = ({sh.render_word(c)})")
    rep.say(f"recovered d = ({sh.render_word(d)})")
    rep.data.update({"shape": _shape_json(sh), "z": sh.render_word(z),
                     "psi1": [int(v) for v in p1], "c": sh.render_word(c),
                     "d": sh.render_word(d), "c_in_C": inC, "d_in_D": inD,
                     "P1": S.P1})
    return EXIT_OK if inC and inD else EXIT_FALSE


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mixedlcd", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, shape_flags=False, h=False, jobs=False):
        p.add_argument("--out", help="directory for JSON/CSV/text reports")
        p.add_argument("--json", action="store_true", help="print the JSON report instead of text")
        if shape_flags:
            p.add_argument("--ring", help="ring spec such as Z4, Z9, F4u2")
            p.add_argument("--s", type=int, default=1, help="quotient index s (default 1)")
            p.add_argument("--blocks", type=int, nargs=2, metavar=("A", "B"))
        if h:
            p.add_argument("--h", type=int, default=0, help="Galois exponent (0 = Euclidean)")
        if jobs:
            p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                           help=f"largest |M| to enumerate (default {DEFAULT_BUDGET})")
            p.add_argument("--jobs", type=int, default=None,
                           help="worker processes (default: all cores)")

    def code_arg(p):
        p.add_argument("code", nargs="?", help="code file or built-in fixture name")
        p.add_argument("--builtin", help="built-in fixture name")

    p = sub.add_parser("check", help="LCD test for a code file")
    code_arg(p)
    common(p, h=True)
    p.add_argument("--criterion", default="all", choices=["all", "bruteforce", "gram", "residue"])
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("dual", help="dual code of a code file")
    code_arg(p)
    common(p, h=True)
    p.set_defaults(func=cmd_dual)

    p = sub.add_parser("distance", help="minimum distances and weight tables")
    code_arg(p)
    common(p)
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("counts", help="LCD counts: formula, census and reference table")
    common(p, shape_flags=True, jobs=True)
    p.add_argument("--variant", default="euclidean", choices=["euclidean", "hermitian"])
    p.add_argument("--classify", action="store_true", help="also count monomial classes")
    p.add_argument("--no-bruteforce", action="store_true", help="formula only")
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("enumerate", help="list every LCD code of a module")
    common(p, shape_flags=True, h=True, jobs=True)
    p.add_argument("--list", action="store_true", help="print each code in the text report")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("classify", help="monomial classes of the LCD codes of a module")
    common(p, shape_flags=True, h=True, jobs=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify-appendix", help="check a classification list")
    p.add_argument("name", help="list file or built-in name such as appendixA1")
    common(p, jobs=True)
    p.add_argument("--completeness", action="store_true",
                   help="also compare against a full census")
    p.set_defaults(func=cmd_verify_appendix)

    for name, func, hlp in (("lcp", cmd_lcp, "LCP test and security thresholds"),
                            ("dsm-demo", cmd_dsm_demo, "direct-sum masking walk-through"),
                            ("adder-demo", cmd_adder_demo, "two-user adder channel decoding")):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("codes", nargs="*", help="code files C and D")
        p.add_argument("--builtin", help="built-in pair such as example61")
        common(p)
        if name == "lcp":
            p.add_argument("--threshold", default="all",
                           choices=["all", "general", "separable", "embedded"])
        if name == "dsm-demo":
            p.add_argument("--x", help="sensitive word, k0 ring entries then l0 quotient entries")
            p.add_argument("--y", help="mask word")
            p.add_argument("--seed", type=int, default=0)
        if name == "adder-demo":
            p.add_argument("--z", help="received word 'x1 .. xa | y1 .. yb'")
            p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)
    return ap


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    rep = Report(args.command)
    try:
        code = args.func(args, rep)
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=stderr)
        return EXIT_INPUT
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: invalid input: {exc}", file=stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INPUT
    rep.write(args.out)
    stdout.write(rep.json_text() if args.json else rep.text())
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
