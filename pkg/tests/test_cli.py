import io
import json

import pytest

from supercoh import cli, serialize


def run(argv):
    buf = io.StringIO()
    code = cli.main(argv, out=buf)
    return code, buf.getvalue()


def test_sh_cyclic_trivial():
    code, out = run(["sh", "--group", "2", "--twist", "0", "--degree", "4"])
    assert code == 0
    assert out.splitlines()[0] == "SH^4(BZ/2): status exact, order 1"


def test_ring_degree_zero():
    code, out = run(["--format", "json", "ring", "--group", "4,4", "--max-degree", "0"])
    assert code == 0
    assert serialize.loads(out)["data"]["dims"] == [1]


def test_reproduce_appendix():
    code, out = run(["reproduce-appendix"])
    assert code == 0
    assert out.strip().splitlines()[-1] == "d3(x1y1) = 0; SH4 -> H2 nonzero"


def test_mismatch_exit(monkeypatch):
    monkeypatch.setattr(cli, "reproduce_appendix", lambda: ([("forced failure", False, "")], {}))
    code, out = run(["reproduce-appendix"])
    assert code == cli.EXIT_MISMATCH and "FAIL" in out


@pytest.mark.parametrize("argv, code", [
    (["bogus"], 2), (["ring", "--group", "1,x"], 2), (["sh", "--group", "2", "--degree", "9"], 3),
    (["ring", "--group", "4,4,4,4"], 3), (["sq", "--group", "4", "--i", "2", "--class", "z1"], 2),
    (["--format", "dot", "brpic", "--center", "2Vect"], 2),
])
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


def test_json_byte_stable(tmp_path):
    argv = ["--format", "json", "sh", "--group", "4,4"]
    a, b = run(argv)[1], run(argv)[1]
    assert a == b
    doc = json.loads(a)
    assert doc["schema"] == serialize.SCHEMA and doc["data"]["order"] == 32


def test_cache_transparency(tmp_path):
    argv = ["--format", "json", "--cache-dir", str(tmp_path), "sh", "--group", "4,2"]
    cold = run(argv)[1]
    warm = run(argv)[1]
    plain = run(["--format", "json", "sh", "--group", "4,2"])[1]
    assert cold == warm == plain
    assert list(tmp_path.rglob("*.json"))


def test_fixture_citations_shown():
    code, out = run(["--fixture-policy", "allow", "sh", "--group", "4", "--twist", "x2"])
    assert code == 0 and "fixture sh4-twisted-cyclic-2group" in out


@pytest.mark.parametrize("argv, needle", [
    (["kx", "--group", "4,2", "--degree", "5"], "Z/4+Z/2^3"),
    (["integral", "--group", "3", "--degree", "4"], "Z/3"),
    (["sq", "--group", "4,4", "--i", "2", "--class", "x1y1", "--kernel"], "span{x1y1}"),
    (["ahss-page", "--group", "4,4", "--page", "3"], "E_3 page"),
    (["classify", "--group", "2", "--all-twists"], "classifications over Z/2: 3"),
    (["hom-grid", "--group", "4", "--z", "2", "--labels", "0=SVect,2=Vect"], "pi0 of order 2"),
    (["--format", "dot", "hom-grid", "--group", "4", "--z", "2", "--labels", "0=SVect,2=Vect"], "digraph"),
    (["brpic", "--center", "2SVect"], "Z/2+Z/2"),
    (["lemma45"], "orbits under t3 -> t3 + Sq1c2: 1"),
    (["lemma45", "--strict"], "inconsistent"),
])
def test_verbs(argv, needle):
    code, out = run(argv)
    assert code == 0 and needle in out
