"""Smoke test for the Python extension.

Build and place the module next to this script first:

    cargo build --release -p lifting-python
    cp target/release/liblifting.so python/lifting.so
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import lifting  # noqa: E402


def main():
    rows = lifting.enumerate_a_even(2, 1)
    assert rows == [("1001", 2, "101"), ("1100", 3, "110")], rows

    psi = lifting.build("psi-n1", 2)
    assert (psi.arity, psi.n, len(psi)) == (3, 2, 2)
    assert json.loads(psi.to_json())["meta"]["name"] == "psi-n1"
    assert lifting.Descriptor.from_json(psi.to_json()).arity == 3

    ctx = lifting.MatrixContext.random(3, 2, seed=7)
    report = lifting.verify("thm21", ctx, 2, trials=5, seed=7)
    assert report["pass"], report
    assert report["notes"]["uncorrected_nonzero_trials"] > 0

    commuting = lifting.MatrixContext.random(3, 2, seed=1, commuting=True)
    assert commuting.commuting()
    assert lifting.verify("thm11", commuting, 2, l=1, trials=5)["pass"]

    # d(x) = x d + 1 and the residue of d^-1 x^-1
    w = [-8]
    d = lifting.Symbol.parse("d^1", w)
    x = lifting.Symbol.parse("x^1", w)
    assert str(d * x) == "1 x^0 d^0 + 1 x^1 d^1"
    assert (d.bracket(x)).coefficient([0], [0]) == "1"
    assert (lifting.Symbol.parse("d^-1", w) * lifting.Symbol.parse("x^-1", w)).residue() == "1"
    assert str(x.log_derivation("d", 1)) == "1 x^0 d^-1"

    series = lifting.bracket_series_check(4, trials=3)
    assert series["pass"] and series["notes"]["coefficients"] == ["1", "1/2", "2/3", "3/2"]

    psido = lifting.PsidoContext(1, [-10])
    assert lifting.verify("thm21", psido, 2, trials=2, seed=3)["pass"]

    assert lifting.certify("thm21", 2)["pass"]
    lemma = lifting.certify("lemma111", 1, 1)
    print("lemma111 (1,1): stated factor", lemma["notes"]["stated_factor"],
          "observed", lemma["notes"]["observed_factor"])

    try:
        lifting.build("psi-n1", 1)
    except ValueError:
        pass
    else:
        raise AssertionError("psi-n1 with n = 1 must be rejected")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
