"""Smoke test for the shiftlab extension module.

Build and install first, for example:
    maturin build --release -m crates/py/Cargo.toml -o dist && pip install dist/shiftlab-*.whl
"""

import itertools
import json
import math
from fractions import Fraction

import shiftlab


def frac(r):
    return Fraction(int(r["num"]), int(r["den"]))


def main():
    rows = shiftlab.count_table(2, 4, 8, "squares")
    assert [(n, g) for n, _, g, _ in rows[2:4]] == [(2, 3), (3, 13)]
    assert rows[2][3] == 43
    big = shiftlab.count_table(2, 4, 300)
    assert isinstance(big[300][3], int) and big[300][3] > 4**300

    x = shiftlab.Shift(2, 4, "squares")
    for n in range(6):
        assert x.count_brute(n) == rows[n][3]
    words = x.enumerate(2)
    assert len(words) == 43 and words == x.enumerate(2)
    assert x.decompose("1:2 O 2:0") == ("1:2", "O 2:0", "")
    left, tau = x.extend_to_good("1:1 1:1", 2)
    assert len(left.split()) <= tau and x.is_good(f"{left} 1:1 1:1")
    assert x.glue_good(["O", "O 1:0"])

    # Independent membership check for the prefix family at (2, 2): a
    # monochromatic marker-free word of length n is allowed iff its first
    # floor(sqrt n) symbols are zeros; exhaustive over length 3.
    y = shiftlab.Shift(2, 2, "prefix")
    for cells in itertools.product([(1, 0), (1, 1)], repeat=3):
        w = " ".join(f"{a}:{d}" for a, d in cells)
        assert y.is_restricted(w) == (cells[0][1] == 0), w

    cond = shiftlab.condition(3, 4, "squares")
    assert cond["verdict"] == "fails" and frac(cond["lhs_exact"]) == Fraction(14, 3)
    assert frac(shiftlab.condition(2, 4)["lhs_exact"]) == 1 + 2 * Fraction(11, 9)
    assert shiftlab.dichotomy(2, 4)["verdict"] == "not-intrinsically-ergodic"
    assert shiftlab.dichotomy(3, 4)["verdict"] == "intrinsically-ergodic"
    assert shiftlab.verify_factor(3, 2, 3, 4, "prefix")
    # N_k = least m with m - floor(sqrt m) >= k for the prefix family.
    want = [next(m for m in itertools.count(1) if m - math.isqrt(m) >= k) for k in range(1, 21)]
    assert [r["N_k"] for r in shiftlab.gaps(20, "prefix")["rows"]] == want

    assert shiftlab.gap_function("0.3", 4) == 68
    assert shiftlab.gap_function("0.3", 12) == 84

    cert = shiftlab.refute("sqrt")
    assert (cert["params"]["N"], cert["params"]["M"]) == (8, 5)
    assert shiftlab.replay(json.dumps(cert))["passed"]
    cert["steps"][2]["conclusion"]["hi"] = str(int(cert["steps"][2]["conclusion"]["hi"]) + 1)
    assert not shiftlab.replay(json.dumps(cert))["passed"]

    for bad in (lambda: shiftlab.Shift(1, 4), lambda: x.is_allowed("9:9"), lambda: x.enumerate(13)):
        try:
            bad()
        except (ValueError, RuntimeError):
            pass
        else:
            raise AssertionError("expected an error")
    print("smoke test passed")


if __name__ == "__main__":
    main()
