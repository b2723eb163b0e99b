import json

from treehopf import LinComb, parse_lincomb
from treehopf.cli import run


def run_cli(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out.rstrip("\n"), out.err


def test_delta_k_display(capsys):
    code, out, _ = run_cli(capsys, "delta-k", "4")
    assert code == 0
    assert out == "1 [[][][]] + 3 [[[]][]] + 1 [[[][]]] + 1 [[[[]]]]"


def test_coproduct_display(capsys):
    code, out, _ = run_cli(capsys, "coproduct", "[[]]")
    assert code == 0
    assert out == "1 ([[]] | 1) + 1 (1 | [[]]) + 1 ([] | [])"


def test_trees_listing(capsys):
    code, out, _ = run_cli(capsys, "trees", "--vertices", "4")
    assert code == 0
    assert out.splitlines() == ["[[][][]]", "[[[]][]]", "[[[][]]]", "[[[[]]]]"]


def test_antipode_and_multiply(capsys):
    code, out, _ = run_cli(capsys, "antipode", "[[]]")
    assert code == 0
    assert out == "1 []*[] - 1 [[]]"
    code, out, _ = run_cli(capsys, "multiply", "[]", "2 [[]]")
    assert code == 0
    assert out == "2 [[]]*[]"


def test_grow_and_decompose(capsys):
    code, out, _ = run_cli(capsys, "grow", "--by", "[]", "[[]]")
    assert code == 0
    assert out == "1 [[][]] + 1 [[[]]]"
    code, out, _ = run_cli(capsys, "decompose", "[[][]]")
    assert code == 0
    assert out == "1 N{[]}(N{[]}(.)) - 1 N{[[]]}(.)"


def test_json_round_trip(capsys):
    code, out, _ = run_cli(capsys, "--json", "antipode", "[[][]]")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == 1
    rebuilt = LinComb.zero()
    for term in payload["lincomb"]:
        rebuilt = rebuilt + parse_lincomb(f"{term['coeff']} {term['forest']}")
    from treehopf import antipode, parse_tree, LinComb as LC

    assert rebuilt == antipode(LC.of(parse_tree("[[][]]")))


def test_parse_error_exit_code(capsys):
    code, out, err = run_cli(capsys, "coproduct", "[[]")
    assert code == 2
    assert "position" in err


def test_usage_error_exit_code(capsys):
    assert run(["frobnicate"]) == 2


def test_subalgebra_closure_exit_codes(capsys):
    code, out, _ = run_cli(capsys, "subalgebra", "--gens", "fan:1",
                           "--max-degree", "4", "--check-closure")
    assert code == 0
    assert "closed under the coproduct" in out
    code, out, _ = run_cli(capsys, "subalgebra", "--gens", "[[][]]",
                           "--max-degree", "4", "--check-closure")
    assert code == 1
    assert "escapes the span" in out


def test_butcher_commands(tmp_path, capsys):
    field = tmp_path / "field.txt"
    field.write_text("f1 = 1 + x2\nf2 = x1\n")
    code, out, _ = run_cli(capsys, "butcher", "--field", str(field), "--tree", "[[]]")
    assert code == 0
    assert out.splitlines()[0].startswith("phi^1 =")
    code, out, _ = run_cli(capsys, "--json", "butcher", "--field", str(field),
                           "--taylor", "4")
    assert code == 0
    payload = json.loads(out)
    assert payload["taylor"][1] == ["1", "0"]
    assert payload["taylor"][2] == ["0", "1/2"]


def test_cm_gamma(capsys):
    code, out, _ = run_cli(capsys, "cm", "gamma", "--psi", "x + 1/2 x^2",
                           "--Gamma", "x", "--tree", "[]", "--order", "6")
    assert code == 0
    assert "y" in out
    code, out, _ = run_cli(capsys, "cm", "gamma", "--psi", "x", "--Gamma", "x",
                           "--tree", "[[]]", "--order", "6")
    assert code == 0
    assert out == "0"


def test_out_writes_file(tmp_path, capsys):
    target = tmp_path / "out.txt"
    code = run(["--out", str(target), "delta-k", "3"])
    assert code == 0
    assert target.read_text().strip() == "1 [[][]] + 1 [[[]]]"


def test_verify_growth_suite(capsys):
    code, out, _ = run_cli(capsys, "verify", "--suite", "growth", "--max-degree", "4")
    assert code == 0
    assert "suite growth: ok" in out


def test_verify_json_schema(capsys):
    code, out, _ = run_cli(capsys, "--json", "verify", "--suite", "hopf",
                           "--max-degree", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["schema"] == 1
    assert payload["ok"] is True
    assert payload["suites"][0]["suite"] == "hopf"


def test_verify_deterministic(capsys):
    code1, out1, _ = run_cli(capsys, "--json", "verify", "--suite", "butcher",
                             "--max-degree", "3", "--seed", "5")
    code2, out2, _ = run_cli(capsys, "--json", "verify", "--suite", "butcher",
                             "--max-degree", "3", "--seed", "5")
    assert (code1, out1) == (code2, out2)
