"""Smoke test for the Python bindings.

Run after `pip install --no-build-isolation crates/python`:

    python python/smoke_test.py

Cross-checks against scipy when it is importable.
"""

import math
import pathlib
import sys
import tempfile

import circumplex_eval as ce


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(b))


def check_scoring():
    assert ce.score_clarity(0.2, 0.4) == 0.7
    assert ce.score_orthogonality(0.5) == 1.0
    assert ce.score_connotativeness(0.2, 0.6) + ce.score_nonconnotativeness(0.2, 0.6) == 1.0
    assert close(ce.score_implicative_balance(0.9, 0.3), 0.4)
    try:
        ce.score_clarity(1.5, 0.0)
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range rating accepted")
    assert ce.neighbors("calm") == ("derived", "pleasant", "uneventful", "chaotic")


def check_tests():
    r = ce.mann_whitney([1, 2], [3, 4])
    assert r["p_value"] == 1 / 3, r
    groups = [[1, 2, 2, 5], [3, 4, 4, 6, 7], [0, 1, 8]]
    kw = ce.kruskal_wallis(groups)
    ci = ce.conover_iman(groups)
    assert len(ci["pairs"]) == 3 and close(ci["h"], kw["statistic"])
    blocks = [[1, 2, 3], [2, 1, 3], [1, 3, 2], [1, 2, 3]]
    fr = ce.friedman(blocks)
    obs = [(f"b{i}", f"g{j}", v) for i, row in enumerate(blocks) for j, v in enumerate(row)]
    pr = ce.prentice(obs)
    assert close(fr["statistic"], pr["statistic"]) and close(fr["p_value"], pr["p_value"])
    assert abs(ce.chi_square_sf(3.841459, 1) - 0.05) < 1e-6

    try:
        from scipy import stats
    except ImportError:
        print("scipy not available; skipping cross-checks")
        return
    h, p = stats.kruskal(*groups)
    assert close(kw["statistic"], h) and close(kw["p_value"], p), (kw, h, p)
    s, p = stats.friedmanchisquare(*zip(*blocks))
    assert close(fr["statistic"], s) and close(fr["p_value"], p), (fr, s, p)
    res = stats.mannwhitneyu([1.5, 2, 7, 9, 11], [3, 4, 5, 6], method="exact")
    mw = ce.mann_whitney([1.5, 2, 7, 9, 11], [3, 4, 5, 6])
    assert close(mw["p_value"], res.pvalue), (mw, res.pvalue)
    for df in (1, 3, 10):
        assert close(ce.student_t_sf(2.1, df), stats.t.sf(2.1, df))
    assert close(ce.normal_sf(1.3), stats.norm.sf(1.3))


def check_pipeline():
    with tempfile.TemporaryDirectory() as tmp:
        data = pathlib.Path(tmp) / "data"
        ce.synth(str(data), seed=5)
        paths = [str(data / n) for n in ("responses.csv", "respondents.csv", "config.toml")]
        assert ce.ingest_check(*paths) == "retained 63, excluded 3 (4.55%)"
        study = ce.analyze(*paths, combined=True)
        assert study.exclusion == "retained 63, excluded 3 (4.55%)"
        assert len(study.attributes) == 8
        assert study.candidates["calm"] == ["tenang", "menenangkan"]
        m = study.mean("calm", "tenang", "CONN")
        assert 0.0 <= m <= 1.0 and not math.isnan(m)
        tables = study.tables("csv")
        assert "mean_scores" in tables and tables["mean_scores"].startswith("attribute,")
        written = study.write(str(pathlib.Path(tmp) / "out"), "md")
        assert len(written) == len(tables)
        svg = study.radar("calm=tenang,pleasant=menyenangkan")
        assert svg.startswith("<?xml") and svg.count("<polygon") == 2
        again = ce.analyze(*paths, combined=True)
        assert again.tables("csv") == tables


def main():
    check_scoring()
    check_tests()
    check_pipeline()
    print("python smoke test: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
