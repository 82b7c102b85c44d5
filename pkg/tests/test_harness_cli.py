import csv
import io as stdio
import random
from fractions import Fraction

import pytest

from lossy_kernels import harness, io
from lossy_kernels.cli import main
from lossy_kernels.framework import CSV_COLUMNS, ParameterizedInstance, identity_kernel, verify_ratio
from lossy_kernels.generators import GeneratorSpec, generate, random_string
from lossy_kernels.graph import MultiGraph
from lossy_kernels.oracles import exact_cp
from lossy_kernels.problems import get


def df_corpus(count=12):
    rng = random.Random(7)
    return [(f"s{i:02d}", ParameterizedInstance(w, len(set(w)))) for i in range(count)
            for w in [random_string(rng.randint(0, 18), rng.randint(1, 4), rng)]]


def test_empty_corpus_gives_header_only():
    rows = harness.run_experiment([], "cvc", [1.5])
    assert rows == []
    assert harness.to_csv(rows) == ",".join(CSV_COLUMNS) + "\n"


def test_identity_kernel_has_ratio_one():
    g = MultiGraph.from_edges(range(4), [(0, 1), (1, 2), (2, 3), (3, 0)])
    inst = ParameterizedInstance(g, 3)
    problem = get("cvc")
    opt, witness = problem.oracle(g, 3)
    row = verify_ratio(problem, inst, identity_kernel(inst), witness, "c4", 1.5, opt, opt)
    assert row.ratio == 1 and row.strict_ok and row.ok


def test_df_rows_meet_the_guarantee():
    rows = harness.run_experiment(df_corpus(), "df", [0.25, 0.5])
    assert [r.instance for r in rows] == sorted(r.instance for r in rows)
    for r in rows:
        assert r.ratio >= 1 - Fraction(r.accuracy).limit_denominator()
        assert r.ok
    assert not harness.violations(rows)


def test_reruns_are_byte_identical():
    first = harness.to_csv(harness.run_experiment(df_corpus(), "df", [0.5, 0.25]))
    second = harness.to_csv(harness.run_experiment(df_corpus(), "df", [0.25, 0.5]))
    parallel = harness.to_csv(harness.run_experiment(df_corpus(), "df", [0.5, 0.25], threads=2))
    assert first == second == parallel


def test_thread_count_from_environment(monkeypatch):
    monkeypatch.setenv(harness.THREADS_ENV, "3")
    assert harness.thread_count() == 3
    monkeypatch.setenv(harness.THREADS_ENV, "many")
    with pytest.raises(ValueError):
        harness.thread_count()


def test_unverified_rows_have_no_ratio():
    rows = harness.run_experiment(df_corpus(3), "df", [0.5], verify=False)
    assert all(r.ratio is None and r.opt is None and r.ok is None for r in rows)
    assert not harness.violations(rows)


def test_summarize():
    rows = harness.run_experiment(df_corpus(), "df", [0.5]) + harness.run_experiment(df_corpus(2), "df", [0.25], verify=False)
    table = list(csv.DictReader(stdio.StringIO(harness.to_csv(rows))))
    summary = harness.summarize(table)
    assert [(s["accuracy"], s["rows"], s["verified"]) for s in summary] == [("0.250000", 2, 0), ("0.500000", 12, 12)]
    assert summary[0]["min_ratio"] is None
    assert summary[1]["min_ratio"] >= 0.5 and summary[1]["strict_failures"] == 0


# -- generators --------------------------------------------------------------


def test_gnp_extremes():
    assert generate(GeneratorSpec("gnp", {"n": 6, "p": 0}, 1)).num_edges == 0
    assert generate(GeneratorSpec("gnp", {"n": 5, "p": 1}, 1)).num_edges == 10


def test_planted_cycles_can_be_packed():
    for seed in range(20):
        g = generate(GeneratorSpec("planted-cycles", {"n": 14, "k": 3, "extra": 4}, seed))
        assert exact_cp(g, 3)[0] >= 3


def test_generators_are_deterministic():
    for family, params in [("gnp", {"n": 9}), ("planted-cvc", {"n": 12, "k": 3}), ("random-string", {"length": 20, "sigma": 3}),
                           ("steiner-grid", {"rows": 3, "cols": 3, "terminals": 3}), ("vc-bounded", {"k": 3, "n": 8})]:
        a = generate(GeneratorSpec(family, params, 42))
        b = generate(GeneratorSpec(family, params, 42))
        assert repr(a) == repr(b)


def test_generator_errors():
    with pytest.raises(ValueError, match="unknown family"):
        generate(GeneratorSpec("hypercube", {}, 0))
    with pytest.raises(ValueError, match="needs parameter"):
        generate(GeneratorSpec("gnp", {}, 0))


# -- io ----------------------------------------------------------------------


def test_dimacs_roundtrip():
    g = MultiGraph.from_edges(range(4), [(0, 1, 3), (0, 1, 3), (2, 3, 5)], weighted=True)
    text, order = io.format_dimacs(g, terminals=[0, 3], comments=["k 2"])
    back = io.parse_dimacs(text)
    assert order == [0, 1, 2, 3]
    assert back.graph.edge_multiset == g.edge_multiset and back.graph.weights == g.weights
    assert back.terminals == [0, 3] and back.comments == ["k 2"]
    assert io.format_dimacs(back.graph, terminals=back.terminals, comments=back.comments)[0] == text


def test_dimacs_errors():
    with pytest.raises(ValueError, match="header"):
        io.parse_dimacs("e 1 2\n")
    with pytest.raises(ValueError, match="line 2"):
        io.parse_dimacs("p edge 2 1\nx 1 2\n")


def test_intervals_roundtrip():
    ivs = [(1, 3, 0), (2, 2, 1)]
    assert io.parse_intervals(io.format_intervals(ivs)) == ivs
    with pytest.raises(ValueError):
        io.parse_intervals("i 1 2\n")


# -- command line ------------------------------------------------------------


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def value_of(text):
    return next(float(ln.split()[1]) for ln in text.splitlines() if ln.startswith("value"))


def solve_reduced(capsys, problem, reduced, tmp_path):
    code, out, _ = run(capsys, "solve", problem, "--in", reduced)
    assert code == 0
    sol = tmp_path / "sol.txt"
    sol.write_text("".join(ln + "\n" for ln in out.splitlines()[1:]))
    return sol


CASES = [
    ("cvc", "planted-cvc", ["n=14", "k=3"], ["--k", 4, "--alpha", 1.5]),
    ("pvc", "gnp", ["n=10", "p=0.3"], ["--k", 2, "--alpha", 1.5]),
    ("cp", "planted-cycles", ["n=12", "k=2", "extra=3"], ["--k", 2, "--eps", 0.5]),
    ("steiner", "steiner-grid", ["rows=3", "cols=3", "terminals=3"], ["--eps", 0.5]),
    ("ola", "vc-bounded", ["k=2", "n=5"], ["--eps", 0.5]),
]


@pytest.mark.parametrize("problem,family,params,opts", CASES, ids=[c[0] for c in CASES])
def test_cli_roundtrip(capsys, tmp_path, problem, family, params, opts):
    src, red, state, lifted = (tmp_path / n for n in ("in.dimacs", "red.dimacs", "state.json", "lifted.txt"))
    gen_args = ["gen", family, "--seed", 5, "--out", src]
    for p in params:
        gen_args += ["--param", p]
    assert run(capsys, *gen_args)[0] == 0
    assert "seed 5" in src.read_text()
    code, out, _ = run(capsys, "kernelize", problem, "--in", src, "--out", red, "--state", state, *opts)
    assert code == 0 and out.startswith("reduced size")
    sol = solve_reduced(capsys, problem, red, tmp_path)
    code, _, err = run(capsys, "lift", problem, "--state", state, "--solution", sol, "--out", lifted)
    assert code == 0 and lifted.exists()
    k_opt = [opts[opts.index("--k") + 1]] if "--k" in opts else []
    k_args = ["--k", *k_opt] if k_opt else []
    _, solved, _ = run(capsys, "solve", problem, "--in", src, *k_args)
    lifted_value, opt = value_of(err), value_of(solved)
    if get(problem).orientation == "max":
        assert lifted_value <= opt
    else:
        assert lifted_value >= opt


def test_cli_disjoint_factors(capsys, tmp_path):
    words, red, pos, state, sol, lifted = (tmp_path / n for n in ("w.txt", "r.txt", "p.jsonl", "s.json", "sol.txt", "l.txt"))
    words.write_text("abcab\naabbcc\n")
    code, out, _ = run(capsys, "kernelize", "df", "--in", words, "--out", red, "--positions", pos, "--state", state, "--eps", 0.5)
    assert code == 0 and len(out.splitlines()) == 2
    reduced = red.read_text().splitlines()
    maps = io.read_position_maps(pos)
    assert [len(m) for m in maps] == [len(w) for w in reduced]
    assert all(m == sorted(m) for m in maps)
    sol.write_text("")
    code, _, err = run(capsys, "lift", "df", "--state", state, "--line", 2, "--solution", sol, "--out", lifted)
    assert code == 0 and value_of(err) == 0


def test_cli_verify_and_report(capsys, tmp_path):
    files = []
    for i, word in enumerate(["aabb", "abcabc", "abab"]):
        f = tmp_path / f"w{i}.txt"
        f.write_text(word + "\n")
        files.append(f)
    table = tmp_path / "t.csv"
    code, _, _ = run(capsys, "verify", "df", "--in", *files, "--eps", 0.5, "--eps", 0.25, "--csv", table)
    assert code == 0
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 6 and list(rows[0]) == list(CSV_COLUMNS)
    code, out, _ = run(capsys, "report", table)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("problem,accuracy") and len(lines) == 3


def test_cli_errors(capsys, tmp_path):
    g = tmp_path / "g.dimacs"
    g.write_text("p edge 2 1\ne 1 2\n")
    assert run(capsys, "kernelize", "cvc", "--in", g, "--out", tmp_path / "o", "--alpha", 1.5)[0] == 2
    assert run(capsys, "kernelize", "cvc", "--in", g, "--out", tmp_path / "o", "--k", 1)[0] == 2
    assert run(capsys, "kernelize", "cvc", "--in", g, "--out", tmp_path / "o", "--k", 1, "--alpha", 0.5)[0] == 2
    assert run(capsys, "solve", "cvc", "--in", tmp_path / "missing", "--k", 1)[0] == 2
    code, _, err = run(capsys, "kernelize", "steiner", "--in", g, "--out", tmp_path / "o", "--eps", 0.5)
    assert code == 2 and "terminal" in err
    with pytest.raises(SystemExit):
        main(["gen", "no-such-family", "--out", str(tmp_path / "x")])
