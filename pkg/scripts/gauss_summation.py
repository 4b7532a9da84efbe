"""Sum the Gauss series at x = 1 and compare with the closed form.

The terms decay like n^(a+b-c-1), so convergence at x = 1 is slow; the shell
count needed grows quickly as c - a - b shrinks.
"""
import sys

from horncalc.catalog import load_catalog
from horncalc.evaluation import EvalConfig, eval_series, gauss_summation


def main(a=0.5, b=1 / 3, c=3.0, max_shells=5000):
    s = load_catalog().get("Gauss")
    res = eval_series(s, {"a": a, "b": b, "c": c}, (1.0,), EvalConfig(max_shells=max_shells))
    exact = gauss_summation(a, b, c)
    print(f"a={a:g} b={b:g} c={c:g}")
    print(f"series      {res.value:.15f}  ({res.shells_used} shells, tail ~ {res.tail_estimate:.1e})")
    print(f"closed form {exact:.15f}")
    print(f"difference  {abs(res.value - exact):.2e}")
    return 0 if abs(res.value - exact) <= 1e-6 else 1


if __name__ == "__main__":
    vals = [float(v) for v in sys.argv[1:4]]
    sys.exit(main(*vals))
