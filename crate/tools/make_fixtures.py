#!/usr/bin/env python3
"""Regenerates the bundled fixtures under fixtures/.

Sources are written verbatim; unified diffs come from difflib with three
lines of context and a/ b/ path prefixes. Coverage files are produced
separately with `mutest run-tests --coverage-out` (see README).
"""

import difflib
import json
import shutil
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "fixtures"


def write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def project(root: Path, files: dict) -> None:
    for rel, text in files.items():
        write(root / rel, text)


def unified(old: dict, new: dict) -> str:
    out = []
    for rel in sorted(set(old) | set(new)):
        a = old.get(rel, "").splitlines(keepends=True)
        b = new.get(rel, "").splitlines(keepends=True)
        if a == b:
            continue
        fa = f"a/{rel}" if rel in old else "/dev/null"
        fb = f"b/{rel}" if rel in new else "/dev/null"
        out.extend(difflib.unified_diff(a, b, fa, fb, n=3))
    return "".join(out)


def pair(root: Path, old_name: str, new_name: str, old: dict, new: dict, diff_name: str) -> None:
    project(root / old_name, old)
    project(root / new_name, new)
    write(root / diff_name, unified(old, new))


# ---------------------------------------------------------------- demo change

DEMO_BASE = {
    "src/calc.mini": """fn add(a, b) {
    return b + a;
}

fn clamp(x, lo, hi) {
    if (x < lo) {
        return lo;
    }
    return x;
}
""",
    "src/geometry.mini": """fn rect_area(w, h) {
    return w * h;
}

fn rect_perimeter(w, h) {
    return 2 * (w + h);
}

fn square_area(s) {
    return rect_area(s, s);
}
""",
    "src/report.mini": """fn describe(n) {
    if (n > 100) {
        return "large";
    }
    return "small";
}

fn score(hits, misses) {
    let total = hits + misses;
    if (total == 0) {
        return 0;
    }
    return (hits * 100) / total;
}
""",
    "tests/calc_test.mini": """fn test_add() {
    assert_eq(add(2, 0), 2);
}

fn test_clamp_low() {
    assert_eq(clamp(-5, 0, 10), 0);
}

fn test_clamp_mid() {
    assert_eq(clamp(4, 0, 10), 4);
}
""",
    "tests/geometry_test.mini": """fn test_rect_area() {
    assert_eq(rect_area(3, 4), 12);
}

fn test_perimeter() {
    assert_eq(rect_perimeter(3, 4), 14);
}

fn test_square_area() {
    assert_eq(square_area(5), 25);
}
""",
    "tests/report_test.mini": """fn test_describe() {
    assert_eq(describe(500), "large");
}

fn test_score() {
    assert_eq(score(3, 1), 75);
}
""",
}

DEMO_HEAD = {
    "src/calc.mini": """fn add(a, b) {
    return a + b;
}

fn clamp(x, lo, hi) {
    if (x < lo) {
        return lo;
    }
    if (x > hi) {
        return hi;
    }
    return x;
}

fn sum_to(n) {
    let s = 0;
    let i = 1;
    while (i <= n) {
        s = s + i;
        i = i + 1;
    }
    return s;
}

fn sign(x) {
    if (x > 0) {
        return 1;
    }
    if (x < 0) {
        return -1;
    }
    return 0;
}
""",
    "src/geometry.mini": """fn rect_area(w, h) {
    return w * h;
}

fn rect_perimeter(w, h) {
    return 2 * (w + h);
}

fn square_area(s) {
    return rect_area(s, s);
}

fn is_square(w, h) {
    return w == h && w > 0;
}

fn max(a, b) {
    if (a > b) {
        return a;
    }
    return b;
}
""",
    "src/report.mini": """fn describe(n) {
    log("describe called");
    if (n > 100) {
        return "large";
    }
    return "small";
}

fn score(hits, misses) {
    let total = hits + misses;
    print(total);
    if (total == 0) {
        return 0;
    }
    return (hits * 100) / total;
}

fn grade(s) {
    if (s >= 90) {
        return "A";
    }
    if (s >= 50) {
        return "B";
    }
    return "C";
}
""",
    "tests/calc_test.mini": """fn test_add() {
    assert_eq(add(2, 0), 2);
}

fn test_clamp_low() {
    assert_eq(clamp(-5, 0, 10), 0);
}

fn test_clamp_mid() {
    assert_eq(clamp(4, 0, 10), 4);
}

fn test_sum_to() {
    assert_eq(sum_to(4), 10);
}

fn test_sign_positive() {
    assert_eq(sign(7), 1);
}
""",
    "tests/geometry_test.mini": """fn test_rect_area() {
    assert_eq(rect_area(3, 4), 12);
}

fn test_perimeter() {
    assert_eq(rect_perimeter(3, 4), 14);
}

fn test_square_area() {
    assert_eq(square_area(5), 25);
}

fn test_is_square() {
    assert_true(is_square(3, 3));
}

fn test_max() {
    assert_eq(max(9, 2), 9);
}
""",
    "tests/report_test.mini": """fn test_describe() {
    assert_eq(describe(500), "large");
}

fn test_score() {
    assert_eq(score(3, 1), 75);
}

fn test_grade_a() {
    assert_eq(grade(95), "A");
}

fn test_grade_c() {
    assert_eq(grade(10), "C");
}
""",
}

# ---------------------------------------------------------------- cap

CAP_BASE = {
    "src/busy.mini": """fn busy(x) {
    return x;
}
""",
    "tests/busy_test.mini": """fn test_busy() {
    assert_eq(busy(3), 3);
}
""",
}

CAP_HEAD = {
    "src/busy.mini": "fn busy(x) {\n    let a = x;\n"
    + "".join(f"    a = a + {k};\n" for k in range(1, 13))
    + "    return x;\n}\n",
    "tests/busy_test.mini": CAP_BASE["tests/busy_test.mini"],
}

# ---------------------------------------------------------------- bugs

LOOP_BUGS = [
    # (id, function, params, init lines, body line, old call, old expect, new call, new expect)
    ("off_by_one", "weighted_sum", "n, w", ["let s = 0;"], "s = s + w;", "weighted_sum(0, 5)", "0", "weighted_sum(2, 5)", "10"),
    ("sum_range", "sum_range", "n", ["let s = 0;"], "s = s + i;", "sum_range(0)", "0", "sum_range(3)", "6"),
    ("factorial", "factorial", "n", ["let s = 1;"], "s = s * i;", "factorial(0)", "1", "factorial(3)", "6"),
    ("sum_squares", "sum_squares", "n", ["let s = 0;"], "s = s + i * i;", "sum_squares(0)", "0", "sum_squares(2)", "5"),
    ("count_steps", "count_steps", "n", ["let s = 0;"], "s = s + 1;", "count_steps(0)", "0", "count_steps(4)", "4"),
    ("power", "power", "b, n", ["let s = 1;"], "s = s * b;", "power(3, 0)", "1", "power(3, 2)", "9"),
    ("even_sum", "even_sum", "n", ["let s = 0;"], "s = s + 2 * i;", "even_sum(0)", "0", "even_sum(3)", "12"),
]


def loop_source(fn, params, init, body, cmp):
    lines = [f"fn {fn}({params}) {{"]
    lines += [f"    {l}" for l in init]
    lines += ["    let i = 1;", f"    while (i {cmp} n) {{", f"        {body}", "        i = i + 1;", "    }", "    return s;", "}"]
    return "\n".join(lines) + "\n"


CONST_BUGS = [
    # (id, function, buggy body, fixed body, old call, old expect, new call, new expect)
    ("scale", "scale", "return x * 2;", "return x * 3;", "scale(0)", "0", "scale(2)", "6"),
    ("offset", "offset", "return x + 1;", "return x + 2;", "offset(0) > 0", "true", "offset(0)", "2"),
    ("threshold", "over", "return x > 10;", "return x >= 10;", "over(50)", "true", "over(10)", "true"),
]


def test_fn(name, call, expect):
    if expect in ("true", "false"):
        check = f"assert_true({call});" if expect == "true" else f"assert_true(!{call});"
    else:
        check = f"assert_eq({call}, {expect});"
    return f"fn {name}() {{\n    {check}\n}}\n"


def bug(root: Path, buggy: dict, fixed: dict) -> None:
    if root.exists():
        shutil.rmtree(root)
    pair(root, "buggy", "fixed", buggy, fixed, "fix.diff")


def make_bugs():
    corpus = ROOT / "coupling" / "corpus"
    for (bid, fn, params, init, body, oc, oe, nc, ne) in LOOP_BUGS:
        old_test = test_fn(f"test_{fn}_empty", oc, oe)
        new_test = test_fn(f"test_{fn}_two", nc, ne)
        path = f"src/{fn}.mini"
        tpath = f"tests/{fn}_test.mini"
        bug(
            corpus / bid,
            {path: loop_source(fn, params, init, body, "<"), tpath: old_test},
            {path: loop_source(fn, params, init, body, "<="), tpath: old_test + "\n" + new_test},
        )
    for (bid, fn, bb, fb, oc, oe, nc, ne) in CONST_BUGS:
        old_test = test_fn(f"test_{fn}_base", oc, oe)
        new_test = test_fn(f"test_{fn}_fixed", nc, ne)
        param = "x"
        path = f"src/{fn}.mini"
        tpath = f"tests/{fn}_test.mini"
        bug(
            corpus / bid,
            {path: f"fn {fn}({param}) {{\n    {bb}\n}}\n", tpath: old_test},
            {path: f"fn {fn}({param}) {{\n    {fb}\n}}\n", tpath: old_test + "\n" + new_test},
        )

    clamp_old_tests = """fn test_clamp_lower() {
    assert_eq(clamp(-3, 0, 5), 0);
}

fn test_clamp_inside() {
    assert_eq(clamp(3, 0, 5), 3);
}
"""
    clamp_new_test = """
fn test_clamp_upper() {
    assert_eq(clamp(9, 0, 5), 5);
}
"""
    bug(
        ROOT / "coupling" / "clamp",
        {
            "src/clamp.mini": """fn clamp(x, lo, hi) {
    if (x < lo) {
        return lo;
    }
    return x;
}
""",
            "tests/clamp_test.mini": clamp_old_tests,
        },
        {
            "src/clamp.mini": """fn clamp(x, lo, hi) {
    if (x < lo) {
        return lo;
    }
    if (x > hi) {
        return hi;
    }
    return x;
}
""",
            "tests/clamp_test.mini": clamp_old_tests + clamp_new_test,
        },
    )


# ---------------------------------------------------------------- redundancy

REDUNDANT = {
    "src/r.mini": """fn add(a, b) {
    return a + b;
}

fn twice(x) {
    return x + x;
}

fn bump(x) {
    let y = x;
    y = y + 10;
    return y;
}

fn waste(a, b) {
    let t = a * b;
    return a;
}
""",
    "tests/r_test.mini": """fn test_add() {
    assert_eq(add(2, 3), 5);
}

fn test_twice() {
    assert_eq(twice(3), 6);
}

fn test_bump() {
    assert_eq(bump(3), 13);
}

fn test_waste() {
    assert_eq(waste(6, 3), 6);
}
""",
}

MIXED = {
    "src/m.mini": """fn double(x) {
    return x * 2;
}

fn is_pos(x) {
    return x > 0;
}

fn both(a, b) {
    return a && b;
}
""",
    "tests/m_test.mini": """fn test_double() {
    assert_eq(double(2), 4);
}

fn test_is_pos() {
    assert_true(is_pos(5));
}

fn test_both() {
    assert_true(both(true, true));
}
""",
}

# ---------------------------------------------------------------- history


def history():
    d = ROOT / "history"
    if d.exists():
        shutil.rmtree(d)
    for k in range(1, 11):
        test_lines = [" ctx0\n"]
        for j in range(1, k + 1):
            test_lines += [f"+    assert_eq(f({j}), {j});\n", f" ctx{j}\n"]
        diff = (
            "--- a/src/a.mini\n+++ b/src/a.mini\n@@ -1,1 +1,2 @@\n fn f(x) {\n+    return x;\n"
            f"--- a/tests/a_test.mini\n+++ b/tests/a_test.mini\n@@ -1,{k + 1} +1,{2 * k + 1} @@\n"
            + "".join(test_lines)
        )
        record = {
            "change_id": f"c{k:02}",
            "order": k,
            "files": [
                {
                    "path": "src/a.mini",
                    "had_findings": True,
                    "findings_count": 1,
                    "generated": 12,
                    "survived": 12 - k,
                }
            ],
            "diff": diff,
        }
        write(d / f"c{k:02}.json", json.dumps(record, indent=2) + "\n")


def main():
    for sub in ["demo", "cap", "redundancy"]:
        if (ROOT / sub).exists():
            shutil.rmtree(ROOT / sub)
    pair(ROOT / "demo", "base", "head", DEMO_BASE, DEMO_HEAD, "change.diff")
    pair(ROOT / "cap", "base", "head", CAP_BASE, CAP_HEAD, "change.diff")
    make_bugs()
    project(ROOT / "redundancy" / "redundant", REDUNDANT)
    project(ROOT / "redundancy" / "mixed", MIXED)
    history()


if __name__ == "__main__":
    main()
