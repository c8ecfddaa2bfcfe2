"""Smoke test for the minmax_loc extension module.

Build and install first:
    pip install --no-build-isolation ./crates/python
then run:
    python python/smoke_test.py
"""

import csv
import io
import json
import math
import sys

import minmax_loc as ml

TRUTH = (100.0, 100.0)


def check(name, ok, detail=""):
    print(f"{'ok' if ok else 'FAILED'}  {name}  {detail}")
    return ok


def main():
    results = []
    sc = ml.Scenario.reference()
    clean = sc.ranges_for(TRUTH)
    results.append(check(
        "bistatic range",
        math.isclose(clean[0][0], 500 + 550 * math.sqrt(2), abs_tol=1e-9),
        f"{clean[0][0]:.4f} m",
    ))

    est = ml.estimate_minmax(sc, clean, rho_hat=0.5)
    err = ml.rmse([est.position], TRUTH)
    results.append(check("min-max on noiseless ranges", err < 0.5, f"error {err:.3f} m, {est.diagnostics['iterations']} iterations"))

    noisy = [row[:] for row in clean]
    noisy[0][0] += 100.0
    lad = ml.estimate_irls_lp(sc, noisy, p=1.0)
    gn = ml.estimate_gauss_newton(sc, noisy)
    lad_err, gn_err = ml.rmse([lad.position], TRUTH), ml.rmse([gn.position], TRUTH)
    results.append(check("LAD rejects one outlier", lad_err < 1.0, f"LAD {lad_err:.3f} m, LS {gn_err:.3f} m"))

    model = ml.GaussianMixtureModel(0.5, 0.0, 1.0, 20.0, 1.0)
    errors, _, bound = model.sample(3, 4, 42)
    results.append(check("realized bound", bound == max(abs(e) for row in errors for e in row), f"{bound:.3f} m"))

    cfg = json.loads(ml.preset("fig2"))
    cfg["n_mc"] = 5
    cfg["sweep"]["values"] = [0.1, 0.9]
    text = ml.run_experiment(json.dumps(cfg))
    rows = list(csv.DictReader(io.StringIO(text)))
    results.append(check("experiment CSV", len(rows) == 2 * len(cfg["estimators"]), f"{len(rows)} rows"))
    results.append(check("experiment is reproducible", text == ml.run_experiment(json.dumps(cfg))))

    try:
        ml.estimate_minmax(sc, [[1.0]], 1.0)
        results.append(check("bad input raises ValueError", False))
    except ValueError as e:
        results.append(check("bad input raises ValueError", True, str(e)))

    failed = results.count(False)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
